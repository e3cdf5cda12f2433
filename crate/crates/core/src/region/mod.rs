//! Rate regions as unions and intersections of polytopes in rate space.

mod boundary;
mod export;
mod info;
mod min_form;

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::polytope::{rational_to_f64, InequalitySystem, Row};
use crate::prob::{JointDistribution, NetworkSpec};
use crate::sets::SenderSet;

pub use boundary::{boundary_2d, boundary_csv, boundary_svg, BoundaryPoint};
pub use export::region_to_json;
pub use info::ReceiverInfo;
pub use min_form::{min_form_member, MinConstraint, MinForm, MinOption};

/// Default half-width of the boundary band.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Largest `K` for which superset unions are enumerated.
pub const MAX_UNION_SENDERS: usize = 10;

/// Three-valued membership answer for closed regions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Inside,
    Boundary,
    Outside,
}

impl Verdict {
    fn from_tests(relaxed: bool, tight: bool) -> Self {
        match (relaxed, tight) {
            (_, true) => Verdict::Inside,
            (true, false) => Verdict::Boundary,
            (false, false) => Verdict::Outside,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Inside => "inside",
            Verdict::Boundary => "boundary",
            Verdict::Outside => "outside",
        })
    }
}

/// A nonnegative, finite rate vector in bits per channel use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RateTuple(Vec<f64>);

impl RateTuple {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        check_point(&rates)?;
        Ok(RateTuple(rates))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl TryFrom<Vec<f64>> for RateTuple {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        RateTuple::new(v)
    }
}

impl From<RateTuple> for Vec<f64> {
    fn from(r: RateTuple) -> Self {
        r.0
    }
}

fn check_point(rates: &[f64]) -> Result<()> {
    match rates.iter().find(|r| !r.is_finite() || **r < 0.0) {
        Some(r) => usage(format!("rate {r} is not a finite nonnegative number")),
        None => Ok(()),
    }
}

/// `coeffs . R <= rhs` with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRateInequality {
    coeffs: Vec<BigRational>,
    approx: Vec<f64>,
    rhs: f64,
}

impl LinearRateInequality {
    pub fn new(coeffs: Vec<BigRational>, rhs: f64) -> Result<Self> {
        if coeffs.iter().all(Zero::is_zero) {
            return usage("inequality needs a nonzero coefficient");
        }
        if !rhs.is_finite() {
            return usage(format!("inequality rhs {rhs} is not finite"));
        }
        let approx = coeffs.iter().map(rational_to_f64).collect();
        Ok(LinearRateInequality { coeffs, approx, rhs })
    }

    /// `R_T <= rhs` in dimension `k`.
    pub fn sum_over(t: SenderSet, k: usize, rhs: f64) -> Result<Self> {
        let coeffs = (0..k).map(|i| if t.contains(i) { BigRational::one() } else { BigRational::zero() }).collect();
        Self::new(coeffs, rhs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    pub fn lhs(&self, point: &[f64]) -> f64 {
        self.approx.iter().zip(point).map(|(a, x)| a * x).sum()
    }
}

/// Intersection of halfspaces with the nonnegative orthant.
#[derive(Clone, Debug, PartialEq)]
pub struct Polytope {
    dim: usize,
    rows: Vec<LinearRateInequality>,
    /// Smallest rhs among constant rows `0 <= c`, if any came out negative.
    contradiction: Option<f64>,
    label: String,
}

impl Polytope {
    pub fn new(dim: usize, rows: Vec<LinearRateInequality>, label: impl Into<String>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.coeffs.len() != dim) {
            return usage(format!("inequality of dimension {} in a polytope of dimension {dim}", r.coeffs.len()));
        }
        Ok(Polytope { dim, rows, contradiction: None, label: label.into() })
    }

    /// The whole nonnegative orthant.
    pub fn orthant(dim: usize, label: impl Into<String>) -> Self {
        Polytope { dim, rows: Vec::new(), contradiction: None, label: label.into() }
    }

    /// Read a system whose variables are the rate coordinates, in order.
    pub fn from_system(sys: &InequalitySystem, label: impl Into<String>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut contradiction: Option<f64> = None;
        for r in sys.rows() {
            if r.is_constant() {
                if r.rhs < 0.0 {
                    contradiction = Some(contradiction.map_or(r.rhs, |c: f64| c.min(r.rhs)));
                }
            } else {
                rows.push(LinearRateInequality::new(r.coeffs.clone(), r.rhs)?);
            }
        }
        Ok(Polytope { dim: sys.dim(), rows, contradiction, label: label.into() })
    }

    pub fn to_system(&self) -> InequalitySystem {
        let vars: Vec<String> = (1..=self.dim).map(|i| format!("R{i}")).collect();
        let mut rows: Vec<Row> = self.rows.iter().map(|r| Row::new(r.coeffs.clone(), r.rhs)).collect();
        if let Some(c) = self.contradiction {
            rows.push(Row::new(vec![BigRational::zero(); self.dim], c));
        }
        InequalitySystem::with_rows(vars, rows).expect("dimensions agree by construction")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[LinearRateInequality] {
        &self.rows
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_contradictory(&self) -> bool {
        self.contradiction.is_some()
    }

    /// `(relaxed, tightened)` feasibility of `point` with every rhs moved by `+-tol`.
    pub fn test(&self, point: &[f64], tol: f64) -> (bool, bool) {
        let mut relaxed = true;
        let mut tight = true;
        if let Some(c) = self.contradiction {
            relaxed &= 0.0 <= c + tol;
            tight &= 0.0 <= c - tol;
        }
        for r in &self.rows {
            let slack = r.rhs - r.lhs(point);
            if slack < -tol {
                return (false, false);
            }
            tight &= slack >= tol;
        }
        (relaxed, tight)
    }

    pub fn verdict(&self, point: &[f64], tol: f64) -> Verdict {
        let (r, t) = self.test(point, tol);
        Verdict::from_tests(r, t)
    }

    /// Signed distance from `point` to the nearest facet hyperplane, in the
    /// Euclidean norm of each row's coefficient vector.
    pub fn facet_distance(&self, point: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let norm = r.approx.iter().map(|a| a * a).sum::<f64>().sqrt();
                ((r.rhs - r.lhs(point)) / norm).abs()
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Finite union/intersection tree over polytopes.
#[derive(Clone, Debug, PartialEq)]
pub enum RegionExpr {
    Leaf(Polytope),
    Union(Vec<RegionExpr>),
    Intersection(Vec<RegionExpr>),
}

impl RegionExpr {
    pub fn dim(&self) -> Option<usize> {
        match self {
            RegionExpr::Leaf(p) => Some(p.dim),
            RegionExpr::Union(c) | RegionExpr::Intersection(c) => c.iter().find_map(RegionExpr::dim),
        }
    }

    pub fn leaves(&self) -> Vec<&Polytope> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Polytope>) {
        match self {
            RegionExpr::Leaf(p) => out.push(p),
            RegionExpr::Union(c) | RegionExpr::Intersection(c) => c.iter().for_each(|e| e.collect_leaves(out)),
        }
    }

    /// `(relaxed, tightened)` tree evaluation.
    pub fn test(&self, point: &[f64], tol: f64) -> (bool, bool) {
        match self {
            RegionExpr::Leaf(p) => p.test(point, tol),
            RegionExpr::Union(c) => c.iter().fold((false, false), |(r, t), e| {
                let (er, et) = e.test(point, tol);
                (r || er, t || et)
            }),
            RegionExpr::Intersection(c) => c.iter().fold((true, true), |(r, t), e| {
                if !r {
                    return (false, false);
                }
                let (er, et) = e.test(point, tol);
                (r && er, t && et)
            }),
        }
    }
}

/// Three-valued membership of `point` in `region`.
pub fn member(region: &RegionExpr, point: &[f64], tol: f64) -> Result<Verdict> {
    if tol.is_nan() || tol <= 0.0 {
        return usage(format!("tolerance must be positive, got {tol}"));
    }
    if let Some(d) = region.dim() {
        if d != point.len() {
            return usage(format!("point has {} coordinates, region has dimension {d}", point.len()));
        }
    }
    check_point(point)?;
    let (r, t) = region.test(point, tol);
    Ok(Verdict::from_tests(r, t))
}

impl ReceiverInfo {
    /// MAC polytope for decoding the senders in `s` at this receiver.
    pub fn mac_region(&self, s: SenderSet) -> Result<Polytope> {
        let k = self.senders();
        if s.is_empty() || !s.is_subset(SenderSet::full(k)) {
            return usage(format!("decode set {s} must be a nonempty subset of 1..{k}"));
        }
        let rows = s
            .nonempty_subsets()
            .map(|t| LinearRateInequality::sum_over(t, k, self.mi(t, s.difference(t))))
            .collect::<Result<Vec<_>>>()?;
        Polytope::new(k, rows, format!("MAC{s}@Y{}", self.receiver() + 1))
    }

    /// Union of MAC polytopes over all decode sets containing `demand`.
    pub fn receiver_region(&self, demand: SenderSet) -> Result<RegionExpr> {
        let k = self.senders();
        if demand.is_empty() {
            return usage("demand set must be nonempty");
        }
        if k > MAX_UNION_SENDERS {
            return Err(Error::CapExceeded(format!(
                "K = {k} exceeds the superset enumeration limit of {MAX_UNION_SENDERS}"
            )));
        }
        let leaves = demand
            .supersets(k)
            .map(|s| self.mac_region(s).map(RegionExpr::Leaf))
            .collect::<Result<Vec<_>>>()?;
        Ok(RegionExpr::Union(leaves))
    }
}

pub fn mac_region(joint: &JointDistribution, s: SenderSet, receiver: usize) -> Result<Polytope> {
    ReceiverInfo::new(joint, receiver)?.mac_region(s)
}

pub fn receiver_region(joint: &JointDistribution, spec: &NetworkSpec, receiver: usize) -> Result<RegionExpr> {
    if receiver >= spec.receivers() {
        return usage(format!("receiver {} does not exist", receiver + 1));
    }
    ReceiverInfo::new(joint, receiver)?.receiver_region(spec.demand(receiver))
}

pub fn optimal_region(joint: &JointDistribution, spec: &NetworkSpec) -> Result<RegionExpr> {
    let parts = (0..spec.receivers())
        .map(|l| receiver_region(joint, spec, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegionExpr::Intersection(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::{build_joint, InputEnsemble};

    pub(crate) fn adder_joint() -> (NetworkSpec, JointDistribution) {
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
        (spec, joint)
    }

    #[test]
    fn adder_mac_polytope() {
        let (_, joint) = adder_joint();
        let p = mac_region(&joint, SenderSet::full(2), 0).unwrap();
        let rhs: Vec<f64> = p.rows().iter().map(|r| r.rhs()).collect();
        // Rows in subset order {1}, {2}, {1,2}.
        for (got, want) in rhs.iter().zip([1.0, 1.0, 1.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        let region = RegionExpr::Leaf(p);
        assert_eq!(member(&region, &[1.0, 0.6], DEFAULT_TOL).unwrap(), Verdict::Outside);
        assert_eq!(member(&region, &[0.75, 0.75], DEFAULT_TOL).unwrap(), Verdict::Boundary);
        assert_eq!(member(&region, &[0.0, 0.0], DEFAULT_TOL).unwrap(), Verdict::Inside);
    }

    #[test]
    fn singleton_decode_set_has_one_row() {
        let (_, joint) = adder_joint();
        let p = mac_region(&joint, SenderSet::singleton(0), 0).unwrap();
        assert_eq!(p.rows().len(), 1);
        assert!((p.rows()[0].rhs() - 0.5).abs() < 1e-12);
        assert!(mac_region(&joint, SenderSet::EMPTY, 0).is_err());
    }

    #[test]
    fn superset_leaf_counts() {
        let spec = NetworkSpec::new(&[2, 2, 2], &[2], vec![0.5; 16], vec![SenderSet::singleton(0)]).unwrap();
        let joint = build_joint(&spec, &InputEnsemble::uniform(&[2, 2, 2]).unwrap()).unwrap();
        let r = receiver_region(&joint, &spec, 0).unwrap();
        let labels: Vec<&str> = r.leaves().iter().map(|p| p.label()).collect();
        assert_eq!(labels, ["MAC{1}@Y1", "MAC{1,2}@Y1", "MAC{1,3}@Y1", "MAC{1,2,3}@Y1"]);
        // Zero-capacity output: every rhs vanishes.
        assert!(r.leaves().iter().flat_map(|p| p.rows()).all(|row| row.rhs().abs() < 1e-12));
    }

    #[test]
    fn full_demand_gives_single_leaf() {
        let (spec, joint) = adder_joint();
        assert_eq!(receiver_region(&joint, &spec, 0).unwrap().leaves().len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_usage_error() {
        let (spec, joint) = adder_joint();
        let r = optimal_region(&joint, &spec).unwrap();
        assert!(matches!(member(&r, &[0.1], DEFAULT_TOL), Err(Error::Usage(_))));
        assert!(matches!(member(&r, &[0.1, -0.1], DEFAULT_TOL), Err(Error::Usage(_))));
    }
}
