use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::typical::{typical_type_probability, within};
use super::{generate_codebook_with, message_count, Simulator};
use crate::error::{usage, Error, Result};

/// Size of the list of sender-`j` messages that look typical at receiver `l`
/// when every other sender's codeword is known.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ListSizeReport {
    pub n: usize,
    pub eps: f64,
    /// Messages of the listed sender.
    pub count: usize,
    pub trials: usize,
    pub mean: f64,
    pub stderr: f64,
    /// Probability that one independent wrong codeword is jointly typical.
    pub p_pair: Option<f64>,
    /// Probability that the transmitted tuple is jointly typical.
    pub p_true_typical: Option<f64>,
    /// `p_true_typical + (count - 1) * p_pair`, the exact expectation.
    pub predicted_mean: Option<f64>,
    /// `-(1/n) log2 p_pair`.
    pub exponent: Option<f64>,
}

fn check_listed(sim: &Simulator, l: usize, listed: usize) -> Result<()> {
    sim.receiver(l)?;
    if listed >= sim.spec().senders() {
        return usage(format!("listed sender {} out of range", listed + 1));
    }
    Ok(())
}

/// The reference pmf of `(Q, X1..XK, Y_l)` and the same pmf with `X_j`
/// redrawn independently from `p(x_j | q)`.
fn pair_pmfs(sim: &Simulator, l: usize, j: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let model = sim.receiver(l)?;
    let reference = model.full.pmf().to_vec();
    let sizes = model.full.sizes().to_vec();
    // Axis j + 1 is X_j; split the flat index around it.
    let inner: usize = sizes[j + 2..].iter().product();
    let xj = sizes[j + 1];
    let ens = sim.ensemble();
    let x_stride: usize = sizes[1..sizes.len() - 1].iter().product::<usize>() * sizes[sizes.len() - 1];
    let mut draw = vec![0.0; reference.len()];
    for (idx, out) in draw.iter_mut().enumerate() {
        let q = idx / x_stride;
        let digit = idx / inner % xj;
        let base = idx - digit * inner;
        let others: f64 = (0..xj).map(|v| reference[base + v * inner]).sum();
        *out = others * ens.p_x_given_q(j, q)[digit];
    }
    Ok((reference, draw))
}

pub fn pair_typical_probability(sim: &Simulator, l: usize, listed: usize, n: usize, eps: f64) -> Result<f64> {
    check_listed(sim, l, listed)?;
    let (reference, draw) = pair_pmfs(sim, l, listed)?;
    typical_type_probability(&reference, &draw, n, eps, crate::max_table_entries())
}

pub fn true_typical_probability(sim: &Simulator, l: usize, n: usize, eps: f64) -> Result<f64> {
    let reference = sim.receiver(l)?.full.pmf().to_vec();
    typical_type_probability(&reference, &reference, n, eps, crate::max_table_entries())
}

/// Monte Carlo estimate of the expected list size, plus the exact
/// type-class prediction when it fits under the enumeration cap.
#[allow(clippy::too_many_arguments)]
pub fn expected_list_size(
    sim: &Simulator,
    rates: &[f64],
    n: usize,
    eps: f64,
    l: usize,
    listed: usize,
    trials: usize,
    seed: u64,
) -> Result<ListSizeReport> {
    check_listed(sim, l, listed)?;
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    if eps.is_nan() || eps <= 0.0 {
        return usage("eps must be positive");
    }
    let count = message_count(*rates.get(listed).ok_or_else(|| Error::Usage("too few rates".into()))?, n)?;
    let model = sim.receiver(l)?;
    let n_in = sim.spec().input_tuples();
    let ny = model.y_size;

    let sizes: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let cb = generate_codebook_with(sim.ensemble(), rates, n, &mut rng)?;
            // Messages are exchangeable, so message 0 is sent everywhere.
            let xs_at = |m: usize, i: usize| -> usize {
                let xs: Vec<usize> =
                    (0..cb.senders()).map(|k| cb.codeword(k, if k == listed { m } else { 0 })[i]).collect();
                sim.spec().input_index(&xs)
            };
            let sent: Vec<usize> = (0..n).map(|i| xs_at(0, i)).collect();
            let y = sim.sample_outputs(&sent, &mut rng).swap_remove(l);
            let mut counts = Vec::new();
            let mut list = 0;
            for m in 0..count {
                let symbols = (0..n).map(|i| (cb.q_seq()[i] * n_in + xs_at(m, i)) * ny + y[i]);
                if within(model.full.epsilon_star_symbols(symbols, &mut counts), eps) {
                    list += 1;
                }
            }
            Ok(list)
        })
        .collect::<Result<_>>()?;

    let mean = sizes.iter().sum::<usize>() as f64 / trials as f64;
    let stderr = if trials > 1 {
        let var = sizes.iter().map(|&s| (s as f64 - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
        (var / trials as f64).sqrt()
    } else {
        0.0
    };

    let exact = |r: Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::CapExceeded(_)) => Ok(None),
        Err(e) => Err(e),
    };
    let p_pair = exact(pair_typical_probability(sim, l, listed, n, eps))?;
    let p_true = exact(true_typical_probability(sim, l, n, eps))?;
    let predicted_mean = p_pair.zip(p_true).map(|(pp, pt)| pt + (count - 1) as f64 * pp);
    let exponent = p_pair.filter(|&p| p > 0.0).map(|p| -p.log2() / n as f64);
    Ok(ListSizeReport {
        n,
        eps,
        count,
        trials,
        mean,
        stderr,
        p_pair,
        p_true_typical: p_true,
        predicted_mean,
        exponent,
    })
}
