//! Robust typicality and exact type-class sums.

use crate::error::{usage, Error, Result};
use crate::prob::{JointDistribution, Var, ZERO_PROB};

/// Absolute slack on the relative-deviation test, absorbing float rounding.
pub const TYPICAL_SLACK: f64 = 1e-12;

/// A pmf over tuples of symbols against which joint types are scored.
#[derive(Clone, Debug)]
pub struct TypeModel {
    sizes: Vec<usize>,
    pmf: Vec<f64>,
}

impl TypeModel {
    pub fn new(joint: &JointDistribution, vars: &[Var]) -> Result<Self> {
        let sizes = vars.iter().map(|&v| joint.size_of(v)).collect::<Result<Vec<_>>>()?;
        Ok(TypeModel { sizes, pmf: joint.marginal(vars)? })
    }

    pub fn from_pmf(sizes: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if sizes.iter().product::<usize>() != pmf.len() {
            return usage(format!("pmf of length {} does not match sizes {sizes:?}", pmf.len()));
        }
        Ok(TypeModel { sizes, pmf })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Flat symbol index of one position of a tuple of sequences.
    pub fn symbol(&self, digits: impl IntoIterator<Item = usize>) -> usize {
        digits.into_iter().zip(&self.sizes).fold(0, |acc, (d, &s)| acc * s + d)
    }

    /// Smallest `eps` with `|count/n - p| <= eps * p` for every symbol;
    /// infinite when a zero-probability symbol occurs.
    pub fn epsilon_star_counts(&self, counts: &[u32], n: usize) -> f64 {
        let n = n as f64;
        let mut worst: f64 = 0.0;
        for (&c, &p) in counts.iter().zip(&self.pmf) {
            if p <= ZERO_PROB {
                if c > 0 {
                    return f64::INFINITY;
                }
                continue;
            }
            worst = worst.max((c as f64 / n - p).abs() / p);
        }
        worst
    }

    /// `epsilon_star` of the joint type of flat symbol indices.
    pub fn epsilon_star_symbols(&self, symbols: impl IntoIterator<Item = usize>, counts: &mut Vec<u32>) -> f64 {
        counts.clear();
        counts.resize(self.pmf.len(), 0);
        let mut n = 0;
        for s in symbols {
            counts[s] += 1;
            n += 1;
        }
        self.epsilon_star_counts(counts, n)
    }

    /// `epsilon_star` of a tuple of equal-length sequences, one per axis.
    pub fn epsilon_star(&self, seqs: &[&[usize]]) -> Result<f64> {
        if seqs.len() != self.sizes.len() {
            return usage(format!("{} sequences given for {} variables", seqs.len(), self.sizes.len()));
        }
        let n = seqs.first().map_or(0, |s| s.len());
        if n == 0 || seqs.iter().any(|s| s.len() != n) {
            return usage("sequences must be nonempty and of equal length");
        }
        for (s, &size) in seqs.iter().zip(&self.sizes) {
            if let Some(bad) = s.iter().find(|&&v| v >= size) {
                return usage(format!("symbol {bad} outside an alphabet of size {size}"));
            }
        }
        let mut counts = Vec::new();
        Ok(self.epsilon_star_symbols((0..n).map(|i| self.symbol(seqs.iter().map(|s| s[i]))), &mut counts))
    }

    pub fn is_typical(&self, seqs: &[&[usize]], eps: f64) -> Result<bool> {
        Ok(within(self.epsilon_star(seqs)?, eps))
    }
}

pub(crate) fn within(eps_star: f64, eps: f64) -> bool {
    eps_star <= eps + TYPICAL_SLACK
}

/// Whether `(seqs)` is `eps`-typical for the marginal of `joint` on `vars`.
pub fn is_typical(joint: &JointDistribution, vars: &[Var], seqs: &[&[usize]], eps: f64) -> Result<bool> {
    TypeModel::new(joint, vars)?.is_typical(seqs, eps)
}

pub fn epsilon_star(joint: &JointDistribution, vars: &[Var], seqs: &[&[usize]]) -> Result<f64> {
    TypeModel::new(joint, vars)?.epsilon_star(seqs)
}

/// Probability that `n` i.i.d. draws from `draw` have an `eps`-typical joint
/// type with respect to `reference`, summed exactly over type classes.
///
/// Both pmfs live on the same flat symbol space. `cap` bounds the number of
/// type classes visited.
pub fn typical_type_probability(reference: &[f64], draw: &[f64], n: usize, eps: f64, cap: usize) -> Result<f64> {
    if reference.len() != draw.len() {
        return usage("reference and sampling pmfs differ in length");
    }
    if n == 0 {
        return usage("blocklength must be positive");
    }
    let nf = n as f64;
    let slack = eps + TYPICAL_SLACK;
    // Admissible counts of every symbol carrying reference mass; the others must be 0.
    let mut support = Vec::new();
    for (a, &p) in reference.iter().enumerate() {
        if p <= ZERO_PROB {
            continue;
        }
        let lo = (nf * p * (1.0 - slack)).floor().max(0.0) as usize;
        let hi = ((nf * p * (1.0 + slack)).ceil() as usize).min(n);
        let counts: Vec<usize> = (lo..=hi).filter(|&c| (c as f64 / nf - p).abs() <= slack * p).collect();
        if counts.is_empty() {
            return Ok(0.0);
        }
        support.push((a, counts));
    }
    let ln_fact = ln_factorials(n);
    let ln_draw: Vec<f64> = support.iter().map(|(a, _)| draw[*a].ln()).collect();
    let min_rest: Vec<usize> = suffix_sums(support.iter().map(|(_, c)| c[0]));
    let max_rest: Vec<usize> = suffix_sums(support.iter().map(|(_, c)| *c.last().unwrap()));

    let mut acc = LogSum::default();
    let mut visited = 0usize;
    let mut stack: Vec<(usize, usize, f64)> = vec![(0, 0, ln_fact[n])];
    while let Some((depth, used, ln_term)) = stack.pop() {
        if depth == support.len() {
            if used == n {
                acc.add(ln_term);
            }
            continue;
        }
        visited += 1;
        if visited > cap {
            return Err(Error::CapExceeded(format!("more than {cap} type classes at n = {n}")));
        }
        for &c in &support[depth].1 {
            let used2 = used + c;
            if used2 + min_rest[depth + 1] > n || used2 + max_rest[depth + 1] < n {
                continue;
            }
            if c > 0 && ln_draw[depth] == f64::NEG_INFINITY {
                continue;
            }
            let t = ln_term - ln_fact[c] + if c > 0 { c as f64 * ln_draw[depth] } else { 0.0 };
            stack.push((depth + 1, used2, t));
        }
    }
    Ok(acc.value())
}

fn suffix_sums(it: impl Iterator<Item = usize>) -> Vec<usize> {
    let v: Vec<usize> = it.collect();
    let mut out = vec![0; v.len() + 1];
    for i in (0..v.len()).rev() {
        out[i] = out[i + 1] + v[i];
    }
    out
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for i in 1..=n {
        out[i] = out[i - 1] + (i as f64).ln();
    }
    out
}

/// Streaming `ln(sum exp(x_i))`.
#[derive(Default)]
struct LogSum {
    max: Option<f64>,
    scaled: f64,
}

impl LogSum {
    fn add(&mut self, x: f64) {
        match self.max {
            None => {
                self.max = Some(x);
                self.scaled = 1.0;
            }
            Some(m) if x > m => {
                self.scaled = self.scaled * (m - x).exp() + 1.0;
                self.max = Some(x);
            }
            Some(m) => self.scaled += (x - m).exp(),
        }
    }

    fn value(&self) -> f64 {
        self.max.map_or(0.0, |m| m.exp() * self.scaled)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_bit() -> TypeModel {
        TypeModel::from_pmf(vec![2], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn exact_type_is_typical_for_any_eps() {
        let m = uniform_bit();
        assert!(m.is_typical(&[&[0, 1, 1, 0]], 1e-6).unwrap());
    }

    #[test]
    fn one_in_four_needs_half() {
        let m = uniform_bit();
        assert_eq!(m.epsilon_star(&[&[0, 0, 0, 1]]).unwrap(), 0.5);
        assert!(m.is_typical(&[&[0, 0, 0, 1]], 0.5).unwrap());
        assert!(!m.is_typical(&[&[0, 0, 0, 1]], 0.49).unwrap());
    }

    #[test]
    fn zero_probability_symbol_is_never_typical() {
        let m = TypeModel::from_pmf(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(m.epsilon_star(&[&[0, 1], &[0, 0]]).unwrap(), f64::INFINITY);
        assert!(m.is_typical(&[&[0, 1], &[0, 1]], 0.1).unwrap());
    }

    #[test]
    fn type_sum_matches_brute_force() {
        let p = [0.3, 0.2, 0.1, 0.4];
        let r = [0.25, 0.25, 0.25, 0.25];
        let m = TypeModel::from_pmf(vec![4], p.to_vec()).unwrap();
        let n = 6;
        for eps in [0.3, 0.6, 0.9, 2.0] {
            let mut want = 0.0;
            let mut seq = vec![0usize; n];
            for _ in 0..4usize.pow(n as u32) {
                if m.is_typical(&[&seq], eps).unwrap() {
                    want += seq.iter().map(|&s| r[s]).product::<f64>();
                }
                crate::prob::increment(&mut seq, &[4; 6]);
            }
            let got = typical_type_probability(&p, &r, n, eps, 1_000_000).unwrap();
            assert!((got - want).abs() < 1e-13, "eps {eps}: {got} vs {want}");
        }
    }

    #[test]
    fn full_mass_when_eps_is_huge() {
        let p = [0.5, 0.5];
        let got = typical_type_probability(&p, &p, 30, 10.0, 1_000_000).unwrap();
        assert!((got - 1.0).abs() < 1e-12);
    }
}
