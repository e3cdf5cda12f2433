//! Random networks and ensembles for fuzzing and searches.

use rand::Rng;

use crate::error::Result;
use crate::hk::HKEnsemble;
use crate::prob::{InputEnsemble, NetworkSpec};
use crate::sets::SenderSet;

/// A pmf drawn uniformly from the probability simplex.
pub fn random_pmf<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    let mut p: Vec<f64> = w.iter().map(|x| x / total).collect();
    // Put the rounding residue on the largest entry so the sum is 1 to machine precision.
    let resid = 1.0 - p.iter().sum::<f64>();
    let imax = (0..n).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap_or(0);
    p[imax] += resid;
    p
}

/// Channel table with independent random rows `p(y | x)`.
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R, inputs: &[usize], outputs: &[usize]) -> Vec<f64> {
    let n_in: usize = inputs.iter().product();
    let n_out: usize = outputs.iter().product();
    (0..n_in).flat_map(|_| random_pmf(rng, n_out)).collect()
}

/// Random nonempty subset of `{0, .., k-1}`.
pub fn random_nonempty_subset<R: Rng + ?Sized>(rng: &mut R, k: usize) -> SenderSet {
    SenderSet::from_bits(rng.gen_range(1..(1u32 << k)))
}

/// Random network with `k` senders, `l` receivers, alphabets in `2..=max_alphabet`
/// and random nonempty demand sets.
pub fn random_spec<R: Rng + ?Sized>(rng: &mut R, k: usize, l: usize, max_alphabet: usize) -> Result<NetworkSpec> {
    let inputs: Vec<usize> = (0..k).map(|_| rng.gen_range(2..=max_alphabet)).collect();
    let outputs: Vec<usize> = (0..l).map(|_| rng.gen_range(2..=max_alphabet)).collect();
    let channel = random_channel(rng, &inputs, &outputs);
    let demands = (0..l).map(|_| random_nonempty_subset(rng, k)).collect();
    NetworkSpec::new(&inputs, &outputs, channel, demands)
}

/// Random ensemble with the given input alphabets and `|Q| = q_size`.
pub fn random_ensemble<R: Rng + ?Sized>(rng: &mut R, x_sizes: &[usize], q_size: usize) -> Result<InputEnsemble> {
    let p_q = random_pmf(rng, q_size);
    let cond = x_sizes.iter().map(|&s| (0..q_size).map(|_| random_pmf(rng, s)).collect()).collect();
    InputEnsemble::new(p_q, cond)
}

/// Deterministic channel `y_l = f_l(x)` with uniformly random tables.
pub fn random_deterministic_spec<R: Rng + ?Sized>(
    rng: &mut R,
    inputs: &[usize],
    outputs: &[usize],
    demands: Vec<SenderSet>,
) -> Result<NetworkSpec> {
    let n_in: usize = inputs.iter().product();
    let n_out: usize = outputs.iter().product();
    let mut channel = vec![0.0; n_in * n_out];
    for x in 0..n_in {
        channel[x * n_out + rng.gen_range(0..n_out)] = 1.0;
    }
    NetworkSpec::new(inputs, outputs, channel, demands)
}

/// Random rate-split ensemble with binary virtual inputs, physical input
/// alphabets in `2..=4`, outputs in `2..=3` and `|Q|` in `1..=max_q`.
pub fn random_hk_ensemble<R: Rng + ?Sized>(rng: &mut R, max_q: usize) -> Result<HKEnsemble> {
    let inputs = [rng.gen_range(2..=4), rng.gen_range(2..=4)];
    let outputs = [rng.gen_range(2..=3), rng.gen_range(2..=3)];
    let channel = random_channel(rng, &inputs, &outputs);
    let base = NetworkSpec::new(&inputs, &outputs, channel, vec![SenderSet::singleton(0), SenderSet::singleton(1)])?;
    let q = rng.gen_range(1..=max_q);
    let ens = random_ensemble(rng, &[2, 2, 2, 2], q)?;
    let map1 = (0..4).map(|_| rng.gen_range(0..inputs[0])).collect();
    let map2 = (0..4).map(|_| rng.gen_range(0..inputs[1])).collect();
    HKEnsemble::new(base, ens, map1, map2)
}
