use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config, usage, Error, Result};
use crate::prob::InputEnsemble;

/// Number of messages at rate `rate` and blocklength `n`: `ceil(2^(n R))`.
pub fn message_count(rate: f64, n: usize) -> Result<usize> {
    if !rate.is_finite() || rate < 0.0 {
        return usage(format!("rate {rate} must be a nonnegative number"));
    }
    let exact = (n as f64 * rate).exp2();
    // A hair of slack so that rates like log2(3)/2 give 3 messages, not 4.
    let count = (exact - 1e-9).ceil().max(1.0);
    if count > (1u64 << 40) as f64 {
        return Err(Error::CapExceeded(format!("2^({n} * {rate}) messages")));
    }
    Ok(count as usize)
}

/// One realization of the random code: the shared time-sharing sequence and
/// every sender's codewords.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    n: usize,
    q_seq: Vec<usize>,
    /// `codewords[k][m]` is sender `k`'s length-`n` codeword for message `m`.
    codewords: Vec<Vec<Vec<usize>>>,
}

impl Codebook {
    /// Validates lengths and alphabets against `ensemble`.
    pub fn new(ensemble: &InputEnsemble, q_seq: Vec<usize>, codewords: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let n = q_seq.len();
        if n == 0 {
            return config("blocklength must be positive");
        }
        if q_seq.iter().any(|&q| q >= ensemble.q_size()) {
            return config("time-sharing symbol outside the Q alphabet");
        }
        if codewords.len() != ensemble.senders() {
            return config(format!("{} codeword lists for {} senders", codewords.len(), ensemble.senders()));
        }
        for (k, book) in codewords.iter().enumerate() {
            if book.is_empty() {
                return config(format!("sender {} has no codewords", k + 1));
            }
            for w in book {
                if w.len() != n {
                    return config(format!("sender {} has a codeword of length {} != {n}", k + 1, w.len()));
                }
                if w.iter().any(|&x| x >= ensemble.x_sizes()[k]) {
                    return config(format!("sender {} codeword symbol outside its alphabet", k + 1));
                }
            }
        }
        Ok(Codebook { n, q_seq, codewords })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q_seq(&self) -> &[usize] {
        &self.q_seq
    }

    pub fn senders(&self) -> usize {
        self.codewords.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.codewords.iter().map(Vec::len).collect()
    }

    pub fn codeword(&self, k: usize, m: usize) -> &[usize] {
        &self.codewords[k][m]
    }

    /// Total number of full message tuples.
    pub fn tuples(&self) -> usize {
        self.codewords.iter().map(Vec::len).product()
    }
}

/// Draw a codebook from a ChaCha8 stream seeded with `seed`.
pub fn generate_codebook(ensemble: &InputEnsemble, rates: &[f64], n: usize, seed: u64) -> Result<Codebook> {
    generate_codebook_with(ensemble, rates, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn generate_codebook_with<R: Rng + ?Sized>(
    ensemble: &InputEnsemble,
    rates: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<Codebook> {
    if n == 0 {
        return config("blocklength must be positive");
    }
    if rates.len() != ensemble.senders() {
        return usage(format!("{} rates for {} senders", rates.len(), ensemble.senders()));
    }
    let counts = rates.iter().map(|&r| message_count(r, n)).collect::<Result<Vec<_>>>()?;
    let symbols = counts.iter().try_fold(0usize, |acc, &c| c.checked_mul(n).and_then(|v| acc.checked_add(v)));
    let tuples = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    let cap = crate::max_table_entries();
    if symbols.is_none_or(|s| s > cap) || tuples.is_none_or(|t| t > cap) {
        return Err(Error::CapExceeded(format!(
            "message counts {counts:?} at n = {n} exceed the cap of {cap} (set {})",
            crate::MAX_TABLE_ENV
        )));
    }

    let q_dist = WeightedIndex::new(ensemble.p_q()).map_err(|e| Error::Config(format!("p_q: {e}")))?;
    let q_seq: Vec<usize> = (0..n).map(|_| q_dist.sample(rng)).collect();
    let mut codewords = Vec::with_capacity(counts.len());
    for (k, &count) in counts.iter().enumerate() {
        let dists = (0..ensemble.q_size())
            .map(|q| WeightedIndex::new(ensemble.p_x_given_q(k, q)).map_err(|e| Error::Config(format!("p(x|q): {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let book = (0..count).map(|_| q_seq.iter().map(|&q| dists[q].sample(rng)).collect()).collect();
        codewords.push(book);
    }
    Ok(Codebook { n, q_seq, codewords })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_round_up() {
        assert_eq!(message_count(0.0, 5).unwrap(), 1);
        assert_eq!(message_count(0.5, 4).unwrap(), 4);
        assert_eq!(message_count(0.3, 4).unwrap(), 3);
        assert_eq!(message_count(3f64.log2() / 2.0, 2).unwrap(), 3);
        assert!(message_count(-0.1, 2).is_err());
    }

    #[test]
    fn zero_rate_gives_one_codeword() {
        let ens = InputEnsemble::uniform(&[2, 3]).unwrap();
        let cb = generate_codebook(&ens, &[0.0, 0.0], 6, 1).unwrap();
        assert_eq!(cb.counts(), vec![1, 1]);
    }

    #[test]
    fn forced_inputs_repeat() {
        let ens = InputEnsemble::iid(&[vec![0.0, 1.0]]).unwrap();
        let cb = generate_codebook(&ens, &[1.0], 3, 9).unwrap();
        for m in 0..8 {
            assert_eq!(cb.codeword(0, m), &[1, 1, 1]);
        }
    }

    #[test]
    fn same_seed_same_codebook() {
        let ens = InputEnsemble::uniform(&[2, 2]).unwrap();
        let a = generate_codebook(&ens, &[0.5, 0.25], 4, 42).unwrap();
        let b = generate_codebook(&ens, &[0.5, 0.25], 4, 42).unwrap();
        let c = generate_codebook(&ens, &[0.5, 0.25], 4, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
