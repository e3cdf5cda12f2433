use std::fmt;

use serde::{Deserialize, Serialize};

use super::typical::within;
use super::{Codebook, ReceiverModel, Simulator};
use crate::error::{usage, Result};
use crate::prob::increment;

/// The decoding rules compared by the simulator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "eps", rename_all = "snake_case")]
pub enum DecoderKind {
    /// Maximize the likelihood averaged over undemanded messages.
    Mld,
    /// Maximize the likelihood over full tuples, keep the demanded part.
    SimultaneousMl,
    /// Minimize the smallest typicality threshold the tuple meets.
    TypicalityScore,
    /// Unique demanded tuple typical with some completion.
    Snd(f64),
    /// Unique full tuple typical.
    Sd(f64),
    /// Unique demanded tuple typical with `(q, y)` alone.
    Ian(f64),
}

impl DecoderKind {
    /// Parse a CLI name; `eps` is required by the threshold rules.
    pub fn parse(name: &str, eps: Option<f64>) -> Result<Self> {
        let need = |eps: Option<f64>| eps.ok_or_else(|| crate::Error::Usage(format!("decoder {name} needs --eps")));
        let kind = match name.to_ascii_lowercase().as_str() {
            "mld" => DecoderKind::Mld,
            "sml" | "simultaneous-ml" | "simultaneous_ml" => DecoderKind::SimultaneousMl,
            "score" | "typicality-score" | "typicality_score" => DecoderKind::TypicalityScore,
            "snd" => DecoderKind::Snd(need(eps)?),
            "sd" => DecoderKind::Sd(need(eps)?),
            "ian" => DecoderKind::Ian(need(eps)?),
            _ => return usage(format!("unknown decoder {name:?} (mld, sml, score, snd, sd, ian)")),
        };
        kind.validate()?;
        Ok(kind)
    }

    /// All six rules, the threshold ones at `eps`.
    pub fn all(eps: f64) -> [DecoderKind; 6] {
        [
            DecoderKind::Mld,
            DecoderKind::SimultaneousMl,
            DecoderKind::TypicalityScore,
            DecoderKind::Snd(eps),
            DecoderKind::Sd(eps),
            DecoderKind::Ian(eps),
        ]
    }

    pub fn name(self) -> &'static str {
        match self {
            DecoderKind::Mld => "mld",
            DecoderKind::SimultaneousMl => "sml",
            DecoderKind::TypicalityScore => "score",
            DecoderKind::Snd(_) => "snd",
            DecoderKind::Sd(_) => "sd",
            DecoderKind::Ian(_) => "ian",
        }
    }

    pub fn eps(self) -> Option<f64> {
        match self {
            DecoderKind::Snd(e) | DecoderKind::Sd(e) | DecoderKind::Ian(e) => Some(e),
            _ => None,
        }
    }

    pub(crate) fn validate(self) -> Result<()> {
        match self.eps() {
            Some(e) if !(e > 0.0 && e < 1.0) => usage(format!("eps = {e} must lie in (0, 1)")),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.eps() {
            Some(e) => write!(f, "{}({e})", self.name()),
            None => f.write_str(self.name()),
        }
    }
}

#[derive(Default)]
pub(crate) struct Scratch {
    lik: Vec<f64>,
    score: Vec<f64>,
    counts: Vec<u32>,
    hits: Vec<bool>,
}

/// A codebook laid out for fast decoding at one receiver.
///
/// Full message tuples are indexed in row-major order with sender 1 most
/// significant; demanded tuples likewise over the demanded senders.
#[derive(Clone, Debug)]
pub struct PreparedReceiver<'a> {
    model: &'a ReceiverModel,
    n: usize,
    counts: Vec<usize>,
    tuples: usize,
    demanded_count: usize,
    /// Per tuple and position, the input-tuple index times `|Y|`.
    x_row: Vec<usize>,
    /// Per tuple and position, the `(q, x)` part of the full type symbol times `|Y|`.
    full_base: Vec<usize>,
    demanded_of: Vec<usize>,
    /// Per demanded tuple and position, the `(q, x_D)` symbol times `|Y|`.
    ian_base: Vec<usize>,
}

impl<'a> PreparedReceiver<'a> {
    pub(crate) fn new(sim: &'a Simulator, cb: &Codebook, l: usize) -> Result<Self> {
        let model = sim.receiver(l)?;
        let spec = sim.spec();
        if cb.senders() != spec.senders() {
            return usage(format!("codebook has {} senders, network has {}", cb.senders(), spec.senders()));
        }
        let x_sizes = spec.input_sizes();
        for (k, &size) in x_sizes.iter().enumerate() {
            for m in 0..cb.counts()[k] {
                if cb.codeword(k, m).iter().any(|&x| x >= size) {
                    return usage(format!("codeword of sender {} leaves its alphabet", k + 1));
                }
            }
        }
        let n = cb.n();
        let counts = cb.counts();
        let tuples = cb.tuples();
        let ny = model.y_size;
        let n_in = spec.input_tuples();
        let demand: Vec<usize> = model.demand.iter().collect();
        let demanded_counts: Vec<usize> = demand.iter().map(|&k| counts[k]).collect();
        let demanded_count = demanded_counts.iter().product();
        let d_inputs: usize = demand.iter().map(|&k| x_sizes[k]).product();

        let mut x_row = Vec::with_capacity(tuples * n);
        let mut full_base = Vec::with_capacity(tuples * n);
        let mut demanded_of = Vec::with_capacity(tuples);
        let mut m = vec![0usize; counts.len()];
        for _ in 0..tuples {
            for i in 0..n {
                let xs: Vec<usize> = m.iter().enumerate().map(|(k, &mk)| cb.codeword(k, mk)[i]).collect();
                let x = spec.input_index(&xs);
                x_row.push(x * ny);
                full_base.push((cb.q_seq()[i] * n_in + x) * ny);
            }
            demanded_of.push(demand.iter().fold(0, |acc, &k| acc * counts[k] + m[k]));
            increment(&mut m, &counts);
        }

        let mut ian_base = Vec::with_capacity(demanded_count * n);
        let mut d = vec![0usize; demand.len()];
        for _ in 0..demanded_count {
            for i in 0..n {
                let xd = demand.iter().zip(&d).fold(0, |acc, (&k, &mk)| acc * x_sizes[k] + cb.codeword(k, mk)[i]);
                ian_base.push((cb.q_seq()[i] * d_inputs + xd) * ny);
            }
            increment(&mut d, &demanded_counts);
        }
        Ok(PreparedReceiver { model, n, counts, tuples, demanded_count, x_row, full_base, demanded_of, ian_base })
    }

    pub fn y_size(&self) -> usize {
        self.model.y_size
    }

    pub fn tuples(&self) -> usize {
        self.tuples
    }

    pub fn demanded_tuples(&self) -> usize {
        self.demanded_count
    }

    /// Demanded-tuple index of a full message tuple.
    pub fn demanded_index(&self, messages: &[usize]) -> usize {
        self.model.demand.iter().fold(0, |acc, k| acc * self.counts[k] + messages[k])
    }

    /// Messages of the demanded senders, in sender order.
    pub fn demanded_messages(&self, mut d: usize) -> Vec<usize> {
        let demand: Vec<usize> = self.model.demand.iter().collect();
        let mut out = vec![0; demand.len()];
        for (slot, &k) in demand.iter().enumerate().rev() {
            out[slot] = d % self.counts[k];
            d /= self.counts[k];
        }
        out
    }

    fn likelihoods(&self, y: &[usize], out: &mut Vec<f64>) {
        out.clear();
        let ch = &self.model.channel;
        out.extend(self.x_row.chunks_exact(self.n).map(|row| row.iter().zip(y).map(|(&r, &yi)| ch[r + yi]).product::<f64>()));
    }

    fn full_eps_star(&self, t: usize, y: &[usize], counts: &mut Vec<u32>) -> f64 {
        let base = &self.full_base[t * self.n..(t + 1) * self.n];
        self.model.full.epsilon_star_symbols(base.iter().zip(y).map(|(&b, &yi)| b + yi), counts)
    }

    fn ian_eps_star(&self, d: usize, y: &[usize], counts: &mut Vec<u32>) -> f64 {
        let base = &self.ian_base[d * self.n..(d + 1) * self.n];
        self.model.ian.epsilon_star_symbols(base.iter().zip(y).map(|(&b, &yi)| b + yi), counts)
    }

    /// Decoded demanded-tuple index, or `None` for the error flag.
    pub(crate) fn decide(&self, y: &[usize], kind: DecoderKind, s: &mut Scratch) -> Option<usize> {
        match kind {
            DecoderKind::Mld => {
                self.likelihoods(y, &mut s.lik);
                s.score.clear();
                s.score.resize(self.demanded_count, 0.0);
                for (t, &p) in s.lik.iter().enumerate() {
                    s.score[self.demanded_of[t]] += p;
                }
                Some(first_max(&s.score))
            }
            DecoderKind::SimultaneousMl => {
                self.likelihoods(y, &mut s.lik);
                Some(self.demanded_of[first_max(&s.lik)])
            }
            DecoderKind::TypicalityScore => {
                s.score.clear();
                s.score.resize(self.demanded_count, f64::INFINITY);
                for t in 0..self.tuples {
                    let e = self.full_eps_star(t, y, &mut s.counts);
                    let d = self.demanded_of[t];
                    s.score[d] = s.score[d].min(e);
                }
                // argmin with ties to the smallest index
                let mut best = 0;
                for d in 1..self.demanded_count {
                    if s.score[d] < s.score[best] {
                        best = d;
                    }
                }
                Some(best)
            }
            DecoderKind::Snd(eps) => {
                s.hits.clear();
                s.hits.resize(self.demanded_count, false);
                for t in 0..self.tuples {
                    let d = self.demanded_of[t];
                    if !s.hits[d] && within(self.full_eps_star(t, y, &mut s.counts), eps) {
                        s.hits[d] = true;
                    }
                }
                unique(&s.hits)
            }
            DecoderKind::Sd(eps) => {
                let mut found = None;
                for t in 0..self.tuples {
                    if within(self.full_eps_star(t, y, &mut s.counts), eps) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some(t);
                    }
                }
                found.map(|t| self.demanded_of[t])
            }
            DecoderKind::Ian(eps) => {
                let mut found = None;
                for d in 0..self.demanded_count {
                    if within(self.ian_eps_star(d, y, &mut s.counts), eps) {
                        if found.is_some() {
                            return None;
                        }
                        found = Some(d);
                    }
                }
                found
            }
        }
    }

    /// `sum_t p(y | t) [decision wrong for t]` for one output sequence.
    pub(crate) fn wrong_mass(&self, y: &[usize], kind: DecoderKind, s: &mut Scratch) -> f64 {
        let decision = self.decide(y, kind, s);
        if !matches!(kind, DecoderKind::Mld | DecoderKind::SimultaneousMl) {
            self.likelihoods(y, &mut s.lik);
        }
        s.lik.iter().zip(&self.demanded_of).filter(|(_, &d)| Some(d) != decision).map(|(&p, _)| p).sum()
    }
}

fn first_max(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

fn unique(hits: &[bool]) -> Option<usize> {
    let mut it = hits.iter().enumerate().filter(|(_, &h)| h);
    match (it.next(), it.next()) {
        (Some((d, _)), None) => Some(d),
        _ => None,
    }
}
