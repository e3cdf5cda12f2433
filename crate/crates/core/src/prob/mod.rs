//! Finite-alphabet probability machinery over `(Q, X1..XK, Y1..YL)`.

mod joint;
mod network;
pub mod schema;

pub use joint::{build_joint, JointDistribution, Var};
pub(crate) use network::increment;
pub use network::{compose_virtual_channel, Alphabet, InputEnsemble, NetworkSpec, VirtualMap};

/// Tolerance on pmf normalization.
pub const PMF_TOL: f64 = 1e-12;

/// Probabilities below this are exact zeros in entropy sums.
pub const ZERO_PROB: f64 = 1e-15;

/// Entropy in bits of an (unnormalized-safe) probability vector.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > ZERO_PROB)
        .map(|&p| -p * p.log2())
        .sum()
}

pub(crate) fn check_pmf(what: &str, probs: &[f64]) -> crate::Result<()> {
    if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return crate::error::config(format!("{what}: entry {bad} is not a nonnegative number"));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PMF_TOL {
        return crate::error::config(format!("{what}: sums to {total}, expected 1"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_closed_forms() {
        assert!((entropy_bits(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!((entropy_bits(&[0.25, 0.5, 0.25]) - 1.5).abs() < 1e-15);
        assert_eq!(entropy_bits(&[1.0, 0.0]), 0.0);
        assert!(entropy_bits(&[1.0 - 1e-16, 1e-16]) < 1e-15);
    }

    #[test]
    fn pmf_check() {
        assert!(check_pmf("p", &[0.3, 0.7]).is_ok());
        assert!(check_pmf("p", &[0.3, 0.6]).is_err());
        assert!(check_pmf("p", &[1.5, -0.5]).is_err());
    }
}
