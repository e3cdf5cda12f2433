use serde::Serialize;

use crate::error::{usage, Result};
use crate::prob::{JointDistribution, NetworkSpec};
use crate::region::{ReceiverInfo, Verdict};
use crate::sets::SenderSet;

/// One `(D, U)` constraint: `R_D + min_{U'} (R_{U'} + offset(U')) <= rhs`,
/// the minimum running over `U' ⊆ U`.
#[derive(Clone, Debug, Serialize)]
pub struct MinConstraint {
    pub desired: SenderSet,
    pub interfering: SenderSet,
    pub rhs: f64,
    pub options: Vec<MinOption>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MinOption {
    pub subset: SenderSet,
    pub offset: f64,
}

/// Min-form description of one receiver's region, precomputed for repeated
/// membership queries.
#[derive(Clone, Debug)]
pub struct MinForm {
    senders: usize,
    constraints: Vec<MinConstraint>,
}

impl MinForm {
    pub fn new(info: &ReceiverInfo, demand: SenderSet) -> Result<Self> {
        let k = info.senders();
        if demand.is_empty() || !demand.is_subset(SenderSet::full(k)) {
            return usage(format!("demand set {demand} must be a nonempty subset of 1..{k}"));
        }
        let mut constraints = Vec::new();
        for d in demand.nonempty_subsets() {
            for u in demand.complement(k).subsets() {
                let rest = SenderSet::full(k).difference(d).difference(u);
                let rhs = info.mi(d.union(u), rest);
                let options = u
                    .subsets()
                    .map(|u_prime| {
                        let given = d.union(u_prime).union(rest);
                        MinOption { subset: u_prime, offset: info.mi(u.difference(u_prime), given) }
                    })
                    .collect();
                constraints.push(MinConstraint { desired: d, interfering: u, rhs, options });
            }
        }
        Ok(MinForm { senders: k, constraints })
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[MinConstraint] {
        &self.constraints
    }

    /// Same tolerance semantics as [`crate::region::member`].
    pub fn verdict(&self, point: &[f64], tol: f64) -> Result<Verdict> {
        if point.len() != self.senders {
            return usage(format!("point has {} coordinates, expected {}", point.len(), self.senders));
        }
        if tol.is_nan() || tol <= 0.0 {
            return usage(format!("tolerance must be positive, got {tol}"));
        }
        let mut tight = true;
        for c in &self.constraints {
            let inner = c
                .options
                .iter()
                .map(|o| o.subset.sum(point) + o.offset)
                .fold(f64::INFINITY, f64::min);
            let slack = c.rhs - c.desired.sum(point) - inner;
            if slack < -tol {
                return Ok(Verdict::Outside);
            }
            tight &= slack >= tol;
        }
        Ok(if tight { Verdict::Inside } else { Verdict::Boundary })
    }
}

/// Min-form membership of `point` in receiver `l`'s region.
pub fn min_form_member(
    joint: &JointDistribution,
    spec: &NetworkSpec,
    receiver: usize,
    point: &[f64],
    tol: f64,
) -> Result<Verdict> {
    if receiver >= spec.receivers() {
        return usage(format!("receiver {} does not exist", receiver + 1));
    }
    let info = ReceiverInfo::new(joint, receiver)?;
    MinForm::new(&info, spec.demand(receiver))?.verdict(point, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{build_joint, InputEnsemble};
    use crate::region::{member, receiver_region, DEFAULT_TOL};

    /// Y = X1 + X2 with demand {1} only.
    fn adder_one_demand() -> (NetworkSpec, JointDistribution) {
        let mut ch = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                let mut row = [0.0; 3];
                row[x1 + x2] = 1.0;
                ch.extend(row);
            }
        }
        let spec = NetworkSpec::new(&[2, 2], &[3], ch, vec![SenderSet::singleton(0)]).unwrap();
        let joint = build_joint(&spec, &InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
        (spec, joint)
    }

    #[test]
    fn zero_interference_rate_reduces_to_two_bounds() {
        let (spec, joint) = adder_one_demand();
        // With R2 = 0: R1 <= I(X1,X2;Y) = 1.5 and R1 <= I(X1;Y|X2) = 1.
        for (r1, want) in [(0.9, Verdict::Inside), (1.0, Verdict::Boundary), (1.1, Verdict::Outside)] {
            assert_eq!(min_form_member(&joint, &spec, 0, &[r1, 0.0], DEFAULT_TOL).unwrap(), want);
        }
    }

    #[test]
    fn large_interference_rate_saturates() {
        let (spec, joint) = adder_one_demand();
        // The min saturates at I(X2;Y|X1) = 1, leaving R1 <= 1.5 - 1 = 0.5.
        assert_eq!(min_form_member(&joint, &spec, 0, &[0.49, 5.0], DEFAULT_TOL).unwrap(), Verdict::Inside);
        assert_eq!(min_form_member(&joint, &spec, 0, &[0.51, 5.0], DEFAULT_TOL).unwrap(), Verdict::Outside);
    }

    #[test]
    fn agrees_with_mac_form_on_a_grid() {
        let (spec, joint) = adder_one_demand();
        let region = receiver_region(&joint, &spec, 0).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                let p = [i as f64 * 0.0437, j as f64 * 0.0613];
                let a = member(&region, &p, DEFAULT_TOL).unwrap();
                let b = min_form_member(&joint, &spec, 0, &p, DEFAULT_TOL).unwrap();
                if a != Verdict::Boundary && b != Verdict::Boundary {
                    assert_eq!(a, b, "at {p:?}");
                }
            }
        }
    }
}
