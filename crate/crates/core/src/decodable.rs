//! Decodable sender subsets at a fixed rate tuple.
//!
//! A set `S` is decodable at receiver `l` when `R_T <= I(X_T; Y_l | X_{S\T}, Q)`
//! for every `T` in `S`. Decodable sets are closed under union, so the union
//! of all of them is the unique maximal one.

use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::prob::JointDistribution;
use crate::region::ReceiverInfo;
use crate::sets::SenderSet;

/// Margin multiple below which the strict certificate is not evaluated.
pub const CERTIFICATE_MARGIN: f64 = 10.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub subset: SenderSet,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodabilityReport {
    pub set: SenderSet,
    pub decodable: bool,
    pub violated_constraint: Option<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalDecodableSet {
    pub s_star: SenderSet,
    pub all_decodable_sets: Vec<SenderSet>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificatePair {
    pub subset: SenderSet,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prop2Certificate {
    /// False when the rates sit too close to a decodability facet to judge
    /// a strict inequality; `holds` is then not meaningful.
    pub checked: bool,
    pub holds: bool,
    pub pairs: Vec<CertificatePair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skip_reason: Option<String>,
}

/// The CLI-facing summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodableSetReport {
    pub s_star: SenderSet,
    pub decodable_sets: Vec<SenderSet>,
    pub prop2_pairs: Vec<CertificatePair>,
    pub prop2_checked: bool,
    pub prop2_holds: bool,
}

fn check_rates(info: &ReceiverInfo, rates: &[f64]) -> Result<()> {
    if rates.len() != info.senders() {
        return usage(format!("{} rates given for {} senders", rates.len(), info.senders()));
    }
    Ok(())
}

/// Decodability of `set`, reporting the first violation in lexicographic order.
pub fn decodability(info: &ReceiverInfo, rates: &[f64], set: SenderSet, tol: f64) -> Result<DecodabilityReport> {
    check_rates(info, rates)?;
    if !set.is_subset(SenderSet::full(info.senders())) {
        return usage(format!("set {set} is not a subset of the senders"));
    }
    let mut subsets: Vec<SenderSet> = set.nonempty_subsets().collect();
    subsets.sort_by_key(|t| t.lex_key());
    let violated_constraint = subsets.into_iter().find_map(|t| {
        let lhs = t.sum(rates);
        let rhs = info.mi(t, set.difference(t));
        (lhs > rhs + tol).then_some(Violation { subset: t, lhs, rhs })
    });
    Ok(DecodabilityReport { set, decodable: violated_constraint.is_none(), violated_constraint })
}

pub fn is_decodable(
    joint: &JointDistribution,
    rates: &[f64],
    receiver: usize,
    set: SenderSet,
    tol: f64,
) -> Result<DecodabilityReport> {
    decodability(&ReceiverInfo::new(joint, receiver)?, rates, set, tol)
}

/// Every decodable subset, the empty set included, in bitmask order.
pub fn decodable_sets(info: &ReceiverInfo, rates: &[f64], tol: f64) -> Result<Vec<SenderSet>> {
    check_rates(info, rates)?;
    let mut all = Vec::new();
    for s in SenderSet::full(info.senders()).subsets() {
        if decodability(info, rates, s, tol)?.decodable {
            all.push(s);
        }
    }
    Ok(all)
}

/// Union of all decodable sets, which must itself be decodable.
pub fn maximal_set(info: &ReceiverInfo, rates: &[f64], tol: f64) -> Result<MaximalDecodableSet> {
    let all = decodable_sets(info, rates, tol)?;
    let s_star = all.iter().fold(SenderSet::EMPTY, |acc, s| acc.union(*s));
    if !all.contains(&s_star) {
        return Err(Error::Consistency(format!(
            "union {s_star} of all decodable sets is not decodable (tolerance {tol})"
        )));
    }
    Ok(MaximalDecodableSet { s_star, all_decodable_sets: all })
}

pub fn maximal_decodable_set(
    joint: &JointDistribution,
    rates: &[f64],
    receiver: usize,
    tol: f64,
) -> Result<MaximalDecodableSet> {
    maximal_set(&ReceiverInfo::new(joint, receiver)?, rates, tol)
}

/// Check that the union of every pair of decodable sets is decodable.
/// Returns the number of pairs examined.
pub fn check_union_closure(info: &ReceiverInfo, rates: &[f64], tol: f64) -> Result<usize> {
    let sets = decodable_sets(info, rates, tol)?;
    let mut pairs = 0;
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            pairs += 1;
            let report = decodability(info, rates, a.union(*b), tol)?;
            if !report.decodable {
                return Err(Error::Consistency(format!(
                    "{a} and {b} are decodable but their union is not: {:?}",
                    report.violated_constraint
                )));
            }
        }
    }
    Ok(pairs)
}

/// Smallest `|R_T - I(X_T; Y_l | X_{S\T}, Q)|` over all `T` in `S` in `[K]`.
pub fn facet_margin(info: &ReceiverInfo, rates: &[f64]) -> f64 {
    let mut margin = f64::INFINITY;
    for s in SenderSet::full(info.senders()).nonempty_subsets() {
        for t in s.nonempty_subsets() {
            margin = margin.min((t.sum(rates) - info.mi(t, s.difference(t))).abs());
        }
    }
    margin
}

/// Certificate that rates outside `s_star` are too large:
/// `R_U > I(X_U; Y_l | X_{S*}, Q) - tol` for every nonempty `U` off `S*`.
pub fn prop2_certificate(info: &ReceiverInfo, rates: &[f64], s_star: SenderSet, tol: f64) -> Result<Prop2Certificate> {
    check_rates(info, rates)?;
    let k = info.senders();
    let pairs: Vec<CertificatePair> = s_star
        .complement(k)
        .nonempty_subsets()
        .map(|u| CertificatePair { subset: u, lhs: u.sum(rates), rhs: info.mi(u, s_star) })
        .collect();
    let holds = pairs.iter().all(|p| p.lhs > p.rhs - tol);
    let margin = facet_margin(info, rates);
    let (checked, skip_reason) = if margin >= CERTIFICATE_MARGIN * tol {
        (true, None)
    } else {
        (false, Some(format!("rates lie {margin:.3e} from a decodability facet, closer than {CERTIFICATE_MARGIN} * tol")))
    };
    Ok(Prop2Certificate { checked, holds, pairs, skip_reason })
}

pub fn check_prop2_certificate(
    joint: &JointDistribution,
    rates: &[f64],
    receiver: usize,
    s_star: SenderSet,
    tol: f64,
) -> Result<Prop2Certificate> {
    prop2_certificate(&ReceiverInfo::new(joint, receiver)?, rates, s_star, tol)
}

pub fn decodable_set_report(info: &ReceiverInfo, rates: &[f64], tol: f64) -> Result<DecodableSetReport> {
    let m = maximal_set(info, rates, tol)?;
    let cert = prop2_certificate(info, rates, m.s_star, tol)?;
    Ok(DecodableSetReport {
        s_star: m.s_star,
        decodable_sets: m.all_decodable_sets,
        prop2_pairs: cert.pairs,
        prop2_checked: cert.checked,
        prop2_holds: cert.holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{build_joint, InputEnsemble, NetworkSpec};

    const TOL: f64 = 1e-9;

    fn adder() -> ReceiverInfo {
        let mut ch = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let mut row = [0.0; 3];
                row[x1 + x2] = 1.0;
                ch.extend(row);
            }
        }
        let spec = NetworkSpec::new(&[2, 2], &[3], ch, vec![SenderSet::full(2)]).unwrap();
        let joint = build_joint(&spec, &InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
        ReceiverInfo::new(&joint, 0).unwrap()
    }

    #[test]
    fn zero_rates_decode_everything() {
        let info = adder();
        for s in SenderSet::full(2).subsets() {
            assert!(decodability(&info, &[0.0, 0.0], s, TOL).unwrap().decodable);
        }
        assert_eq!(maximal_set(&info, &[0.0, 0.0], TOL).unwrap().s_star, SenderSet::full(2));
    }

    #[test]
    fn single_sender_violation_is_reported() {
        let info = adder();
        let r = decodability(&info, &[0.9, 0.9], SenderSet::singleton(0), TOL).unwrap();
        assert!(!r.decodable);
        let v = r.violated_constraint.unwrap();
        assert_eq!(v.subset, SenderSet::singleton(0));
        assert!((v.lhs - 0.9).abs() < 1e-12 && (v.rhs - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_set_decodable_inside_pentagon() {
        let info = adder();
        assert!(decodability(&info, &[0.4, 0.9], SenderSet::full(2), TOL).unwrap().decodable);
        let m = maximal_set(&info, &[0.4, 0.9], TOL).unwrap();
        assert_eq!(m.s_star, SenderSet::full(2));
    }

    #[test]
    fn large_rates_leave_only_empty_set() {
        let info = adder();
        let m = maximal_set(&info, &[0.9, 0.9], TOL).unwrap();
        assert_eq!(m.s_star, SenderSet::EMPTY);
        assert_eq!(m.all_decodable_sets, vec![SenderSet::EMPTY]);
        let c = prop2_certificate(&info, &[0.9, 0.9], m.s_star, TOL).unwrap();
        assert!(c.checked && c.holds);
        let rhs: Vec<f64> = c.pairs.iter().map(|p| p.rhs).collect();
        for (got, want) in rhs.iter().zip([0.5, 0.5, 1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_vacuous_for_full_set() {
        let info = adder();
        let c = prop2_certificate(&info, &[0.1, 0.1], SenderSet::full(2), TOL).unwrap();
        assert!(c.pairs.is_empty() && c.holds);
    }

    #[test]
    fn certificate_skipped_on_facet() {
        let info = adder();
        let c = prop2_certificate(&info, &[0.5, 0.2], SenderSet::full(2), TOL).unwrap();
        assert!(!c.checked && c.skip_reason.is_some());
    }
}
