use std::fmt;

use crate::error::{config, usage, Result};
use crate::prob::{entropy_bits, InputEnsemble, NetworkSpec};
use crate::sets::SenderSet;

/// A coordinate of the single-letter tuple `(Q, X1..XK, Y1..YL)`.
///
/// Sender and receiver indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Q,
    X(usize),
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Q => write!(f, "Q"),
            Var::X(k) => write!(f, "X{}", k + 1),
            Var::Y(l) => write!(f, "Y{}", l + 1),
        }
    }
}

/// Dense joint pmf over `(Q, X1..XK, Y1..YL)`, row-major in that axis order.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    axes: Vec<Var>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
}

/// Materialize `p(q) prod_k p(x_k|q) p(y1..yL | x1..xK)`.
pub fn build_joint(spec: &NetworkSpec, ensemble: &InputEnsemble) -> Result<JointDistribution> {
    let k = spec.senders();
    if ensemble.senders() != k {
        return config(format!("ensemble has {} senders, network has {k}", ensemble.senders()));
    }
    let x_sizes = spec.input_sizes();
    if ensemble.x_sizes() != x_sizes.as_slice() {
        return config(format!(
            "ensemble input alphabets {:?} differ from network alphabets {:?}",
            ensemble.x_sizes(),
            x_sizes
        ));
    }
    let nq = ensemble.q_size();
    let n_in = spec.input_tuples();
    let n_out = spec.output_tuples();
    let total = nq
        .checked_mul(n_in)
        .and_then(|v| v.checked_mul(n_out))
        .filter(|&v| v <= crate::max_table_entries())
        .ok_or_else(|| {
            crate::Error::Config(format!(
                "joint table of {nq} x {n_in} x {n_out} entries exceeds the cap of {} (set {})",
                crate::max_table_entries(),
                crate::MAX_TABLE_ENV
            ))
        })?;

    let mut probs = Vec::with_capacity(total);
    let mut xs = vec![0usize; k];
    for q in 0..nq {
        let pq = ensemble.p_q()[q];
        for x_index in 0..n_in {
            let px: f64 = (0..k).map(|s| ensemble.p_x_given_q(s, q)[xs[s]]).product();
            let w = pq * px;
            probs.extend(spec.channel_row(x_index).iter().map(|&c| w * c));
            super::network::increment(&mut xs, &x_sizes);
        }
    }

    let mut axes = vec![Var::Q];
    axes.extend((0..k).map(Var::X));
    axes.extend((0..spec.receivers()).map(Var::Y));
    let mut sizes = vec![nq];
    sizes.extend(x_sizes);
    sizes.extend(spec.output_sizes());
    Ok(JointDistribution { axes, sizes, probs })
}

impl JointDistribution {
    pub(crate) fn from_parts(axes: Vec<Var>, sizes: Vec<usize>, probs: Vec<f64>) -> Self {
        debug_assert_eq!(sizes.iter().product::<usize>(), probs.len());
        JointDistribution { axes, sizes, probs }
    }

    pub fn axes(&self) -> &[Var] {
        &self.axes
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn senders(&self) -> usize {
        self.axes.iter().filter(|v| matches!(v, Var::X(_))).count()
    }

    pub fn receivers(&self) -> usize {
        self.axes.iter().filter(|v| matches!(v, Var::Y(_))).count()
    }

    fn axis_of(&self, v: Var) -> Result<usize> {
        self.axes
            .iter()
            .position(|&a| a == v)
            .ok_or_else(|| crate::Error::Usage(format!("variable {v} is not an axis of the joint")))
    }

    pub fn size_of(&self, v: Var) -> Result<usize> {
        Ok(self.sizes[self.axis_of(v)?])
    }

    /// Probability of a full assignment in axis order.
    pub fn get(&self, idx: &[usize]) -> f64 {
        let flat = idx.iter().zip(&self.sizes).fold(0, |acc, (&i, &s)| acc * s + i);
        self.probs[flat]
    }

    /// Marginal over `vars`, returned row-major in the order given.
    pub fn marginal(&self, vars: &[Var]) -> Result<Vec<f64>> {
        let picked: Vec<usize> = vars.iter().map(|&v| self.axis_of(v)).collect::<Result<_>>()?;
        for (i, a) in picked.iter().enumerate() {
            if picked[..i].contains(a) {
                return usage(format!("variable {} listed twice", self.axes[*a]));
            }
        }
        // Stride of each joint axis inside the marginal table (0 if summed out).
        let mut target_stride = vec![0usize; self.axes.len()];
        let mut stride = 1;
        for &a in picked.iter().rev() {
            target_stride[a] = stride;
            stride *= self.sizes[a];
        }
        let mut out = vec![0.0; stride];
        let mut digits = vec![0usize; self.axes.len()];
        let mut target = 0usize;
        let last = self.axes.len() - 1;
        for &p in &self.probs {
            out[target] += p;
            // Odometer step that keeps `target` in sync.
            let mut i = last;
            loop {
                digits[i] += 1;
                target += target_stride[i];
                if digits[i] < self.sizes[i] {
                    break;
                }
                target -= target_stride[i] * digits[i];
                digits[i] = 0;
                if i == 0 {
                    break;
                }
                i -= 1;
            }
        }
        Ok(out)
    }

    /// Joint entropy `H(vars)` in bits; `H(empty) = 0`.
    pub fn entropy(&self, vars: &[Var]) -> Result<f64> {
        if vars.is_empty() {
            return Ok(0.0);
        }
        Ok(entropy_bits(&self.marginal(vars)?))
    }

    /// `H(target | given)` in bits.
    pub fn conditional_entropy(&self, target: &[Var], given: &[Var]) -> Result<f64> {
        let both: Vec<Var> = target.iter().chain(given).copied().collect();
        Ok(self.entropy(&both)? - self.entropy(given)?)
    }

    /// `I(left; right | given)` in bits.
    pub fn conditional_mutual_information(&self, left: &[Var], right: &[Var], given: &[Var]) -> Result<f64> {
        let all: Vec<Var> = left.iter().chain(right).chain(given).copied().collect();
        for (i, v) in all.iter().enumerate() {
            if all[..i].contains(v) {
                return usage(format!("variable {v} appears in more than one argument set"));
            }
        }
        if left.is_empty() || right.is_empty() {
            return Ok(0.0);
        }
        let lg: Vec<Var> = left.iter().chain(given).copied().collect();
        let rg: Vec<Var> = right.iter().chain(given).copied().collect();
        Ok(self.entropy(&lg)? + self.entropy(&rg)? - self.entropy(&all)? - self.entropy(given)?)
    }

    /// Variables `X_k` for `k` in `set`, in increasing order.
    pub fn inputs(set: SenderSet) -> Vec<Var> {
        set.iter().map(Var::X).collect()
    }

    /// `I(X_T; Y_l | X_C, Q)`, the form every rate constraint takes.
    pub fn rate_bound(&self, t: SenderSet, l: usize, c: SenderSet) -> Result<f64> {
        let mut given = Self::inputs(c);
        given.push(Var::Q);
        self.conditional_mutual_information(&Self::inputs(t), &[Var::Y(l)], &given)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::SenderSet;

    fn identity_bit() -> (NetworkSpec, InputEnsemble) {
        let spec = NetworkSpec::new(&[2], &[2], vec![1.0, 0.0, 0.0, 1.0], vec![SenderSet::singleton(0)]).unwrap();
        (spec, InputEnsemble::uniform(&[2]).unwrap())
    }

    fn adder() -> (NetworkSpec, InputEnsemble) {
        let mut ch = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let mut row = [0.0; 3];
                row[x1 + x2] = 1.0;
                ch.extend(row);
            }
        }
        let spec = NetworkSpec::new(&[2, 2], &[3], ch, vec![SenderSet::full(2)]).unwrap();
        (spec, InputEnsemble::uniform(&[2, 2]).unwrap())
    }

    fn xor() -> (NetworkSpec, InputEnsemble) {
        let mut ch = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let mut row = [0.0; 2];
                row[x1 ^ x2] = 1.0;
                ch.extend(row);
            }
        }
        let spec = NetworkSpec::new(&[2, 2], &[2], ch, vec![SenderSet::singleton(0)]).unwrap();
        (spec, InputEnsemble::uniform(&[2, 2]).unwrap())
    }

    #[test]
    fn identity_joint_entries() {
        let (s, e) = identity_bit();
        let j = build_joint(&s, &e).unwrap();
        assert_eq!(j.probs(), &[0.5, 0.0, 0.0, 0.5]);
        let i = j.conditional_mutual_information(&[Var::X(0)], &[Var::Y(0)], &[]).unwrap();
        assert!((i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singleton_q_factors_out() {
        let (s, _) = adder();
        let e = InputEnsemble::new(
            vec![0.3, 0.7],
            vec![vec![vec![0.5, 0.5], vec![0.5, 0.5]], vec![vec![0.5, 0.5], vec![0.5, 0.5]]],
        )
        .unwrap();
        let j = build_joint(&s, &e).unwrap();
        let slice = 12;
        for i in 0..slice {
            assert!((j.probs()[i] / 0.3 - j.probs()[slice + i] / 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn adder_output_marginal() {
        let (s, e) = adder();
        let j = build_joint(&s, &e).unwrap();
        assert_eq!(j.marginal(&[Var::Y(0)]).unwrap(), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn adder_mutual_informations() {
        let (s, e) = adder();
        let j = build_joint(&s, &e).unwrap();
        let x1 = SenderSet::singleton(0);
        let x2 = SenderSet::singleton(1);
        assert!((j.rate_bound(x1, 0, SenderSet::EMPTY).unwrap() - 0.5).abs() < 1e-12);
        assert!((j.rate_bound(x1, 0, x2).unwrap() - 1.0).abs() < 1e-12);
        assert!((j.rate_bound(SenderSet::full(2), 0, SenderSet::EMPTY).unwrap() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn xor_mutual_informations() {
        let (s, e) = xor();
        let j = build_joint(&s, &e).unwrap();
        let i = j.conditional_mutual_information(&[Var::X(0)], &[Var::Y(0)], &[]).unwrap();
        assert!(i.abs() < 1e-12);
        let i = j.conditional_mutual_information(&[Var::X(0)], &[Var::Y(0)], &[Var::X(1)]).unwrap();
        assert!((i - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlapping_sets_rejected() {
        let (s, e) = xor();
        let j = build_joint(&s, &e).unwrap();
        let err = j.conditional_mutual_information(&[Var::X(0)], &[Var::Y(0)], &[Var::X(0)]);
        assert!(matches!(err, Err(crate::Error::Usage(_))));
        assert!(j.marginal(&[Var::Y(3)]).is_err());
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let (s, _) = xor();
        let e = InputEnsemble::uniform(&[2, 3]).unwrap();
        assert!(matches!(build_joint(&s, &e), Err(crate::Error::Config(_))));
    }

    #[test]
    fn marginal_respects_requested_order() {
        let (s, e) = adder();
        let j = build_joint(&s, &e).unwrap();
        let yx = j.marginal(&[Var::Y(0), Var::X(0)]).unwrap();
        // p(y=1, x1=0) = p(x1=0, x2=1) = 1/4.
        assert!((yx[2] - 0.25).abs() < 1e-15);
        assert!((yx[0] - 0.25).abs() < 1e-15);
        assert_eq!(yx[1], 0.0);
    }
}
