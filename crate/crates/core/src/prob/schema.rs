//! JSON ingestion of networks and input ensembles.
//!
//! Layout of a network document:
//!
//! ```text
//! {
//!   "K": 2, "L": 1,
//!   "input_alphabet_sizes": [2, 2],
//!   "output_alphabet_sizes": [3],
//!   "demands": [[1, 2]],                 // 1-based sender indices per receiver
//!   "channel": [...],                    // p(y1..yL | x1..xK), flat
//!   "q_size": 1,                         // optional ensemble fields
//!   "p_q": [1.0],
//!   "p_x_given_q": [[[0.5, 0.5]], [[0.5, 0.5]]]
//! }
//! ```
//!
//! `channel` is row-major over `(x1, .., xK, y1, .., yL)`: `x1` varies
//! slowest and `yL` fastest, so the entry for `(x, y)` sits at
//! `index(x) * prod|Y_l| + index(y)` with each `index` itself row-major.
//! `p_x_given_q[k][q][x]` is `p(X_{k+1} = x | Q = q)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{InputEnsemble, NetworkSpec};
use crate::sets::SenderSet;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub input_alphabet_sizes: Vec<usize>,
    pub output_alphabet_sizes: Vec<usize>,
    pub demands: Vec<SenderSet>,
    pub channel: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_q: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_x_given_q: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub q_size: usize,
    pub p_q: Vec<f64>,
    pub p_x_given_q: Vec<Vec<Vec<f64>>>,
}

impl NetworkFile {
    pub fn to_spec(&self) -> Result<NetworkSpec> {
        if self.input_alphabet_sizes.len() != self.k {
            return Err(Error::Parse(format!(
                "field `input_alphabet_sizes`: {} entries but K = {}",
                self.input_alphabet_sizes.len(),
                self.k
            )));
        }
        if self.output_alphabet_sizes.len() != self.l {
            return Err(Error::Parse(format!(
                "field `output_alphabet_sizes`: {} entries but L = {}",
                self.output_alphabet_sizes.len(),
                self.l
            )));
        }
        NetworkSpec::new(
            &self.input_alphabet_sizes,
            &self.output_alphabet_sizes,
            self.channel.clone(),
            self.demands.clone(),
        )
    }

    /// The embedded ensemble, if the document carries one.
    pub fn ensemble(&self) -> Option<Result<InputEnsemble>> {
        match (&self.q_size, &self.p_q, &self.p_x_given_q) {
            (None, None, None) => None,
            (q_size, Some(p_q), Some(px)) => Some(
                EnsembleFile { q_size: q_size.unwrap_or(p_q.len()), p_q: p_q.clone(), p_x_given_q: px.clone() }
                    .to_ensemble(),
            ),
            _ => Some(Err(Error::Parse(
                "ensemble fields must include both `p_q` and `p_x_given_q`".into(),
            ))),
        }
    }

    pub fn from_spec(spec: &NetworkSpec, ensemble: Option<&InputEnsemble>) -> Self {
        NetworkFile {
            k: spec.senders(),
            l: spec.receivers(),
            input_alphabet_sizes: spec.input_sizes(),
            output_alphabet_sizes: spec.output_sizes(),
            demands: spec.demands().to_vec(),
            channel: spec.channel().to_vec(),
            q_size: ensemble.map(|e| e.q_size()),
            p_q: ensemble.map(|e| e.p_q().to_vec()),
            p_x_given_q: ensemble.map(|e| (0..e.senders()).map(|k| e.conditional_rows(k)).collect()),
        }
    }
}

impl EnsembleFile {
    pub fn to_ensemble(&self) -> Result<InputEnsemble> {
        if self.p_q.len() != self.q_size {
            return Err(Error::Parse(format!(
                "field `p_q`: {} entries but q_size = {}",
                self.p_q.len(),
                self.q_size
            )));
        }
        InputEnsemble::new(self.p_q.clone(), self.p_x_given_q.clone())
    }
}

/// Parse JSON text, reporting line and column on syntax or shape errors.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))
}

pub fn parse_network(text: &str) -> Result<(NetworkSpec, Option<InputEnsemble>)> {
    let file: NetworkFile = parse_json(text)?;
    let spec = file.to_spec()?;
    let ens = file.ensemble().transpose()?;
    Ok((spec, ens))
}

pub fn parse_ensemble(text: &str) -> Result<InputEnsemble> {
    parse_json::<EnsembleFile>(text)?.to_ensemble()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ADDER: &str = r#"{
        "K": 2, "L": 1,
        "input_alphabet_sizes": [2, 2],
        "output_alphabet_sizes": [3],
        "demands": [[1, 2]],
        "channel": [1,0,0, 0,1,0, 0,1,0, 0,0,1],
        "q_size": 1, "p_q": [1.0],
        "p_x_given_q": [[[0.5, 0.5]], [[0.5, 0.5]]]
    }"#;

    #[test]
    fn parses_adder() {
        let (spec, ens) = parse_network(ADDER).unwrap();
        assert_eq!(spec.senders(), 2);
        assert_eq!(spec.demand(0), SenderSet::full(2));
        // x = (1, 0) is input tuple #2; y = 1.
        assert_eq!(spec.channel_row(2), &[0.0, 1.0, 0.0]);
        assert!(ens.is_some());
    }

    #[test]
    fn reports_location_on_syntax_error() {
        let err = parse_network("{\n  \"K\": 2,\n  oops }").unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line 3"), "{msg}"),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn reports_field_on_shape_error() {
        let bad = ADDER.replace("\"input_alphabet_sizes\": [2, 2]", "\"input_alphabet_sizes\": [2]");
        let err = parse_network(&bad).unwrap_err();
        assert!(err.to_string().contains("input_alphabet_sizes"), "{err}");
    }

    #[test]
    fn round_trips_through_file_form() {
        let (spec, ens) = parse_network(ADDER).unwrap();
        let text = serde_json::to_string(&NetworkFile::from_spec(&spec, ens.as_ref())).unwrap();
        let (spec2, ens2) = parse_network(&text).unwrap();
        assert_eq!(spec, spec2);
        assert_eq!(ens, ens2);
    }
}
