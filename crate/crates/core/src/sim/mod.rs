//! Tiny-blocklength random-coding laboratory.
//!
//! Codebooks are drawn from the input ensemble, decoded by the classical
//! rules, and scored either exactly (summing over all messages and output
//! sequences) or by seeded Monte Carlo.

mod codebook;
mod decode;
mod entropy;
mod list;
mod typical;

pub use codebook::{generate_codebook, generate_codebook_with, message_count, Codebook};
pub use decode::{DecoderKind, PreparedReceiver};
pub use entropy::{conditional_entropy_rate, EntropyEstimate};
pub use list::{expected_list_size, pair_typical_probability, true_typical_probability, ListSizeReport};
pub use typical::{epsilon_star, is_typical, typical_type_probability, TypeModel, TYPICAL_SLACK};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::prob::{build_joint, increment, InputEnsemble, JointDistribution, NetworkSpec, Var};
use crate::sets::SenderSet;

/// Output sequences per parallel work unit in exact enumeration.
const CHUNK: usize = 1024;

/// Per-receiver tables shared by every codebook.
#[derive(Clone, Debug)]
pub(crate) struct ReceiverModel {
    pub demand: SenderSet,
    pub y_size: usize,
    /// `p(y_l | x)` indexed `[x_index * y_size + y]`.
    pub channel: Vec<f64>,
    /// Reference pmf of `(Q, X1..XK, Y_l)`.
    pub full: TypeModel,
    /// Reference pmf of `(Q, X_D, Y_l)`.
    pub ian: TypeModel,
}

/// A network with a fixed input ensemble, ready for simulation.
#[derive(Clone, Debug)]
pub struct Simulator {
    spec: NetworkSpec,
    ensemble: InputEnsemble,
    joint: JointDistribution,
    receivers: Vec<ReceiverModel>,
    outputs: Vec<WeightedIndex<f64>>,
}

impl Simulator {
    pub fn new(spec: NetworkSpec, ensemble: InputEnsemble) -> Result<Self> {
        let joint = build_joint(&spec, &ensemble)?;
        let k = spec.senders();
        let mut receivers = Vec::with_capacity(spec.receivers());
        for l in 0..spec.receivers() {
            let demand = spec.demand(l);
            let mut full_vars = vec![Var::Q];
            full_vars.extend((0..k).map(Var::X));
            full_vars.push(Var::Y(l));
            let mut ian_vars = vec![Var::Q];
            ian_vars.extend(demand.iter().map(Var::X));
            ian_vars.push(Var::Y(l));
            receivers.push(ReceiverModel {
                demand,
                y_size: spec.output_sizes()[l],
                channel: spec.receiver_channel(l),
                full: TypeModel::new(&joint, &full_vars)?,
                ian: TypeModel::new(&joint, &ian_vars)?,
            });
        }
        let outputs = (0..spec.input_tuples())
            .map(|x| WeightedIndex::new(spec.channel_row(x)).map_err(|e| Error::Config(format!("channel row {x}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(Simulator { spec, ensemble, joint, receivers, outputs })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn ensemble(&self) -> &InputEnsemble {
        &self.ensemble
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub(crate) fn receiver(&self, l: usize) -> Result<&ReceiverModel> {
        self.receivers
            .get(l)
            .ok_or_else(|| Error::Usage(format!("receiver {} out of range 1..={}", l + 1, self.receivers.len())))
    }

    pub fn generate_codebook(&self, rates: &[f64], n: usize, seed: u64) -> Result<Codebook> {
        generate_codebook(&self.ensemble, rates, n, seed)
    }

    pub fn prepare<'a>(&'a self, codebook: &Codebook, l: usize) -> Result<PreparedReceiver<'a>> {
        PreparedReceiver::new(self, codebook, l)
    }

    /// Decode `y` at receiver `l`; `None` is the error flag.
    pub fn decode(&self, codebook: &Codebook, l: usize, y: &[usize], kind: DecoderKind) -> Result<Option<Vec<usize>>> {
        let prep = self.prepare(codebook, l)?;
        if y.len() != codebook.n() || y.iter().any(|&v| v >= prep.y_size()) {
            return usage("output sequence has the wrong length or alphabet");
        }
        let mut scratch = decode::Scratch::default();
        Ok(prep.decide(y, kind, &mut scratch).map(|d| prep.demanded_messages(d)))
    }

    /// Sample one joint output sequence given the input symbols per position.
    fn sample_outputs<R: Rng + ?Sized>(&self, x_index: &[usize], rng: &mut R) -> Vec<Vec<usize>> {
        let sizes = self.spec.output_sizes();
        let mut ys = vec![Vec::with_capacity(x_index.len()); sizes.len()];
        for &x in x_index {
            let mut o = self.outputs[x].sample(rng);
            for l in (0..sizes.len()).rev() {
                ys[l].push(o % sizes[l]);
                o /= sizes[l];
            }
        }
        ys
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    ExactEnumeration,
    MonteCarlo { trials: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub decoder: DecoderKind,
    pub n: usize,
    pub rates: Vec<f64>,
    #[serde(flatten)]
    pub method: Method,
    /// Error probability per receiver.
    pub error: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
}

/// Effective rates `log2(count) / n` of a codebook.
fn codebook_rates(cb: &Codebook) -> Vec<f64> {
    cb.counts().iter().map(|&c| (c as f64).log2() / cb.n() as f64).collect()
}

/// Exact average error of `codebook` at every receiver.
pub fn exact_error(sim: &Simulator, codebook: &Codebook, kind: DecoderKind) -> Result<ErrorReport> {
    exact_error_capped(sim, codebook, kind, crate::max_table_entries())
}

/// [`exact_error`] with an explicit cap on `|Y_l|^n * (message tuples)`.
pub fn exact_error_capped(sim: &Simulator, codebook: &Codebook, kind: DecoderKind, cap: usize) -> Result<ErrorReport> {
    kind.validate()?;
    let mut error = Vec::with_capacity(sim.spec.receivers());
    for l in 0..sim.spec.receivers() {
        let prep = sim.prepare(codebook, l)?;
        let outputs = (prep.y_size() as u128).pow(codebook.n() as u32);
        if outputs * prep.tuples() as u128 > cap as u128 {
            return Err(Error::CapExceeded(format!(
                "exact error needs {outputs} output sequences x {} message tuples, over the cap of {cap}; \
                 use Monte Carlo instead",
                prep.tuples()
            )));
        }
        let outputs = outputs as usize;
        let n = codebook.n();
        let chunks: Vec<f64> = (0..outputs.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let mut scratch = decode::Scratch::default();
                let sizes = vec![prep.y_size(); n];
                let mut y = digits_of(c * CHUNK, prep.y_size(), n);
                let mut total = 0.0;
                for _ in c * CHUNK..((c + 1) * CHUNK).min(outputs) {
                    total += prep.wrong_mass(&y, kind, &mut scratch);
                    increment(&mut y, &sizes);
                }
                total
            })
            .collect();
        error.push(chunks.iter().sum::<f64>() / prep.tuples() as f64);
    }
    Ok(ErrorReport {
        decoder: kind,
        n: codebook.n(),
        rates: codebook_rates(codebook),
        method: Method::ExactEnumeration,
        error,
        stderr: None,
    })
}

fn digits_of(mut index: usize, base: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for i in (0..n).rev() {
        d[i] = index % base;
        index /= base;
    }
    d
}

/// Where Monte Carlo trials get their codebook from.
#[derive(Clone, Debug)]
pub enum CodeSource {
    /// Every trial reuses this codebook.
    Fixed(Codebook),
    /// Every trial draws a fresh codebook: the ensemble-average error.
    Ensemble { rates: Vec<f64>, n: usize },
}

/// Seeded Monte Carlo error estimate. Trial `t` draws from the ChaCha8
/// stream `t` of the master `seed`, so results do not depend on scheduling.
pub fn monte_carlo_error(
    sim: &Simulator,
    source: &CodeSource,
    kind: DecoderKind,
    trials: usize,
    seed: u64,
) -> Result<ErrorReport> {
    kind.validate()?;
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let (n, rates) = match source {
        CodeSource::Fixed(cb) => (cb.n(), codebook_rates(cb)),
        CodeSource::Ensemble { rates, n } => (*n, rates.clone()),
    };
    let fixed = match source {
        CodeSource::Fixed(cb) => {
            Some((0..sim.spec.receivers()).map(|l| sim.prepare(cb, l)).collect::<Result<Vec<_>>>()?)
        }
        CodeSource::Ensemble { .. } => None,
    };
    let outcomes: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            match (source, &fixed) {
                (CodeSource::Fixed(cb), Some(preps)) => run_trial(sim, cb, preps, kind, &mut rng),
                (CodeSource::Ensemble { rates, n }, _) => {
                    let cb = generate_codebook_with(&sim.ensemble, rates, *n, &mut rng)?;
                    let preps = (0..sim.spec.receivers()).map(|l| sim.prepare(&cb, l)).collect::<Result<Vec<_>>>()?;
                    run_trial(sim, &cb, &preps, kind, &mut rng)
                }
                _ => unreachable!(),
            }
        })
        .collect::<Result<_>>()?;
    let mut error = Vec::new();
    let mut stderr = Vec::new();
    for l in 0..sim.spec.receivers() {
        let wrong = outcomes.iter().filter(|o| o[l]).count();
        let p = wrong as f64 / trials as f64;
        error.push(p);
        stderr.push((p * (1.0 - p) / trials as f64).sqrt());
    }
    Ok(ErrorReport { decoder: kind, n, rates, method: Method::MonteCarlo { trials, seed }, error, stderr: Some(stderr) })
}

/// One transmission; returns whether each receiver got its demand wrong.
fn run_trial(
    sim: &Simulator,
    cb: &Codebook,
    preps: &[PreparedReceiver<'_>],
    kind: DecoderKind,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<bool>> {
    let messages: Vec<usize> = cb.counts().iter().map(|&c| rng.gen_range(0..c)).collect();
    let xs: Vec<usize> = (0..cb.n())
        .map(|i| {
            let symbols: Vec<usize> = messages.iter().enumerate().map(|(k, &m)| cb.codeword(k, m)[i]).collect();
            sim.spec.input_index(&symbols)
        })
        .collect();
    let ys = sim.sample_outputs(&xs, rng);
    let mut scratch = decode::Scratch::default();
    Ok(preps
        .iter()
        .zip(&ys)
        .map(|(prep, y)| prep.decide(y, kind, &mut scratch) != Some(prep.demanded_index(&messages)))
        .collect())
}

#[cfg(test)]
mod tests;
