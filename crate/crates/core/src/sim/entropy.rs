use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_codebook_with, Simulator};
use crate::error::{usage, Error, Result};
use crate::prob::{entropy_bits, increment};
use crate::sets::SenderSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Bits per symbol.
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
    pub n: usize,
}

/// Estimate `(1/n) H(Y_l^n | X_S^n, C_n)`.
///
/// Each sample draws a codebook and the conditioned messages from stream
/// `sample` of `seed`; the entropy of `Y_l^n`, a uniform mixture over the
/// unconditioned messages, is then computed exactly.
pub fn conditional_entropy_rate(
    sim: &Simulator,
    rates: &[f64],
    n: usize,
    l: usize,
    conditioned: SenderSet,
    samples: usize,
    seed: u64,
) -> Result<EntropyEstimate> {
    if samples == 0 {
        return usage("samples must be at least 1");
    }
    let k = sim.spec().senders();
    if !conditioned.is_subset(SenderSet::full(k)) {
        return usage(format!("conditioned set {conditioned} is not a subset of the senders"));
    }
    let model = sim.receiver(l)?;
    let ny = model.y_size;
    let free: Vec<usize> = conditioned.complement(k).iter().collect();

    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            let cb = generate_codebook_with(sim.ensemble(), rates, n, &mut rng)?;
            let counts = cb.counts();
            let mut messages: Vec<usize> = counts.iter().map(|&c| rng.gen_range(0..c)).collect();
            let free_counts: Vec<usize> = free.iter().map(|&k| counts[k]).collect();
            let mixture_size: usize = free_counts.iter().product();
            let outputs = (ny as u128).pow(n as u32);
            let cap = crate::max_table_entries();
            if outputs * mixture_size as u128 > cap as u128 {
                return Err(Error::CapExceeded(format!(
                    "{outputs} output sequences x {mixture_size} mixture components exceed the cap of {cap}"
                )));
            }
            let mut mixture = vec![0.0; outputs as usize];
            let mut u = vec![0usize; free.len()];
            for _ in 0..mixture_size {
                for (slot, &k) in free.iter().enumerate() {
                    messages[k] = u[slot];
                }
                // Product distribution of Y^n for this codeword tuple, built position by position.
                let mut dist = vec![1.0];
                for i in 0..n {
                    let xs: Vec<usize> = messages.iter().enumerate().map(|(k, &m)| cb.codeword(k, m)[i]).collect();
                    let row = &model.channel[sim.spec().input_index(&xs) * ny..][..ny];
                    dist = dist.iter().flat_map(|&p| row.iter().map(move |&w| p * w)).collect();
                }
                for (acc, p) in mixture.iter_mut().zip(dist) {
                    *acc += p;
                }
                increment(&mut u, &free_counts);
            }
            let scale = 1.0 / mixture_size as f64;
            mixture.iter_mut().for_each(|p| *p *= scale);
            Ok(entropy_bits(&mixture) / n as f64)
        })
        .collect::<Result<_>>()?;

    let mean = values.iter().sum::<f64>() / samples as f64;
    let stderr = if samples > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
        (var / samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(EntropyEstimate { mean, stderr, samples, n })
}
