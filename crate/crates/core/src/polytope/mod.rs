//! Linear inequality systems with exact rational coefficients and real
//! right-hand sides: Fourier–Motzkin elimination, redundancy removal and
//! planar vertex enumeration.

pub mod simplex;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{usage, Error, Result};
use simplex::{maximize, LpOutcome};

/// Slack used when deciding that a row is implied by the others.
pub const REDUNDANCY_TOL: f64 = 1e-9;

/// Vertices closer than this are merged.
pub const VERTEX_TOL: f64 = 1e-9;

/// One row `coeffs . x <= rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: Vec<BigRational>,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<BigRational>, rhs: f64) -> Self {
        Row { coeffs, rhs }
    }

    pub fn from_ints(coeffs: &[i64], rhs: f64) -> Self {
        Row { coeffs: coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(), rhs }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(c, v)| rational_to_f64(c) * v).sum()
    }

    /// Rescale by a positive factor so the coefficients are coprime integers.
    pub fn normalized(&self) -> Row {
        if self.is_constant() {
            return self.clone();
        }
        let denom_lcm = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &denom_lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let factor = BigRational::new(denom_lcm, g);
        Row { coeffs: self.coeffs.iter().map(|c| c * &factor).collect(), rhs: self.rhs * rational_to_f64(&factor) }
    }

    fn integer_key(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|c| c.numer().clone()).collect()
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// `a . x <= b` rows over named variables.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalitySystem {
    vars: Vec<String>,
    rows: Vec<Row>,
}

impl InequalitySystem {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        InequalitySystem { vars: vars.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn with_rows(vars: Vec<String>, rows: Vec<Row>) -> Result<Self> {
        let mut s = InequalitySystem { vars, rows: Vec::new() };
        for r in rows {
            s.push(r)?;
        }
        Ok(s)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::Usage(format!("variable `{name}` is not in the system")))
    }

    pub fn push(&mut self, row: Row) -> Result<()> {
        if row.coeffs.len() != self.vars.len() {
            return usage(format!("row has {} coefficients, system has {} variables", row.coeffs.len(), self.vars.len()));
        }
        if !row.rhs.is_finite() {
            return usage(format!("row right-hand side {} is not finite", row.rhs));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Add `coeffs . x = rhs` as two opposite inequalities.
    pub fn push_equality(&mut self, coeffs: Vec<BigRational>, rhs: f64) -> Result<()> {
        let neg = coeffs.iter().map(|c| -c).collect();
        self.push(Row::new(coeffs, rhs))?;
        self.push(Row::new(neg, -rhs))
    }

    /// Add `-x_var <= 0`.
    pub fn push_nonnegative(&mut self, var: usize) -> Result<()> {
        let mut coeffs = vec![BigRational::zero(); self.dim()];
        coeffs[var] = -BigRational::one();
        self.push(Row::new(coeffs, 0.0))
    }

    /// Replace `x_var` everywhere by `expr . x + constant`; `expr[var]` must be 0.
    pub fn substitute(&self, var: usize, expr: &[BigRational], constant: f64) -> Result<Self> {
        if expr.len() != self.dim() || !expr[var].is_zero() {
            return usage("substitution must be over the system's variables and not self-referential");
        }
        let mut rows = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let a = r.coeffs[var].clone();
            let mut coeffs: Vec<BigRational> = r.coeffs.iter().zip(expr).map(|(c, e)| c + &a * e).collect();
            coeffs[var] = BigRational::zero();
            rows.push(Row::new(coeffs, r.rhs - rational_to_f64(&a) * constant));
        }
        let mut out = InequalitySystem { vars: self.vars.clone(), rows };
        out = out.drop_column(var);
        Ok(out)
    }

    fn drop_column(mut self, var: usize) -> Self {
        self.vars.remove(var);
        for r in &mut self.rows {
            r.coeffs.remove(var);
        }
        self
    }

    /// Fourier–Motzkin elimination of one variable.
    ///
    /// Constant rows that come out contradictory (`0 <= negative`) are kept so
    /// that infeasibility stays visible; trivially true constant rows are dropped.
    pub fn eliminate_variable(&self, name: &str) -> Result<Self> {
        let v = self.var_index(name)?;
        let mut keep = Vec::new();
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        for r in &self.rows {
            let r = r.normalized();
            if r.coeffs[v].is_positive() {
                upper.push(r);
            } else if r.coeffs[v].is_negative() {
                lower.push(r);
            } else {
                keep.push(r);
            }
        }
        for u in &upper {
            for l in &lower {
                let su = -l.coeffs[v].clone();
                let sl = u.coeffs[v].clone();
                let coeffs: Vec<BigRational> =
                    u.coeffs.iter().zip(&l.coeffs).map(|(a, b)| a * &su + b * &sl).collect();
                let rhs = u.rhs * rational_to_f64(&su) + l.rhs * rational_to_f64(&sl);
                keep.push(Row::new(coeffs, rhs));
            }
        }
        let out = InequalitySystem { vars: self.vars.clone(), rows: keep }.drop_column(v);
        Ok(out.deduplicated())
    }

    /// Eliminate several variables in order, pruning redundancy after each step.
    pub fn eliminate_all(&self, names: &[&str]) -> Result<Self> {
        let mut s = self.clone();
        for n in names {
            s = s.eliminate_variable(n)?.remove_redundant();
        }
        Ok(s)
    }

    /// Normalize rows, merge duplicates keeping the smallest rhs and drop
    /// constant rows that hold. Order of first appearance is preserved.
    pub fn deduplicated(&self) -> Self {
        let mut rows: Vec<Row> = Vec::new();
        let mut seen: HashMap<Vec<BigInt>, usize> = HashMap::new();
        let mut worst_constant: Option<f64> = None;
        for r in &self.rows {
            let r = r.normalized();
            if r.is_constant() {
                if r.rhs < 0.0 {
                    worst_constant = Some(worst_constant.map_or(r.rhs, |w: f64| w.min(r.rhs)));
                }
                continue;
            }
            match seen.get(&r.integer_key()) {
                Some(&i) => rows[i].rhs = rows[i].rhs.min(r.rhs),
                None => {
                    seen.insert(r.integer_key(), rows.len());
                    rows.push(r);
                }
            }
        }
        if let Some(w) = worst_constant {
            rows.push(Row::new(vec![BigRational::zero(); self.dim()], w));
        }
        InequalitySystem { vars: self.vars.clone(), rows }
    }

    /// True if some constant row reads `0 <= rhs` with `rhs < -tol`.
    pub fn has_contradiction(&self, tol: f64) -> bool {
        self.rows.iter().any(|r| r.is_constant() && r.rhs < -tol)
    }

    /// Check feasibility with the simplex.
    pub fn is_feasible(&self) -> bool {
        if self.has_contradiction(REDUNDANCY_TOL) {
            return false;
        }
        let (a, b) = self.dense();
        !matches!(maximize(&vec![0.0; self.dim()], &a, &b), LpOutcome::Infeasible)
    }

    fn dense(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        let a = self.rows.iter().map(Row::coeffs_f64).collect();
        let b = self.rows.iter().map(|r| r.rhs).collect();
        (a, b)
    }

    /// Remove duplicate rows and rows implied by the remaining ones.
    ///
    /// A row `a . x <= b` is dropped when `max a . x` over the other kept rows
    /// is at most `b + 1e-9`. An infeasible system collapses to one
    /// contradictory constant row.
    pub fn remove_redundant(&self) -> Self {
        let dedup = self.deduplicated();
        if !dedup.is_feasible() {
            let worst = dedup.rows.iter().filter(|r| r.is_constant()).map(|r| r.rhs).fold(-1.0, f64::min);
            return InequalitySystem {
                vars: self.vars.clone(),
                rows: vec![Row::new(vec![BigRational::zero(); self.dim()], worst)],
            };
        }
        let mut kept: Vec<Row> = dedup.rows.clone();
        let mut i = 0;
        while i < kept.len() {
            let others: Vec<&Row> = kept.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, r)| r).collect();
            let a: Vec<Vec<f64>> = others.iter().map(|r| r.coeffs_f64()).collect();
            let b: Vec<f64> = others.iter().map(|r| r.rhs).collect();
            let redundant = match maximize(&kept[i].coeffs_f64(), &a, &b) {
                LpOutcome::Optimal { value, .. } => value <= kept[i].rhs + REDUNDANCY_TOL,
                LpOutcome::Infeasible => true,
                LpOutcome::Unbounded | LpOutcome::Stalled => false,
            };
            if redundant {
                kept.remove(i);
            } else {
                i += 1;
            }
        }
        InequalitySystem { vars: self.vars.clone(), rows: kept }
    }

    /// All rows hold at `x` with the given slack added to every rhs.
    pub fn satisfies(&self, x: &[f64], slack: f64) -> bool {
        self.rows.iter().all(|r| r.eval(x) <= r.rhs + slack)
    }

    /// Reorder variables to `order` (a permutation of the current names).
    pub fn reordered(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.dim() {
            return usage("reordering must name every variable exactly once");
        }
        let idx: Vec<usize> = order.iter().map(|n| self.var_index(n)).collect::<Result<_>>()?;
        let rows = self
            .rows
            .iter()
            .map(|r| Row::new(idx.iter().map(|&i| r.coeffs[i].clone()).collect(), r.rhs))
            .collect();
        Ok(InequalitySystem { vars: order.iter().map(|s| s.to_string()).collect(), rows })
    }

    /// Vertices of `{x in R^2_+ : rows hold}`, counterclockwise starting from
    /// the lowest (then leftmost) vertex. Empty if infeasible.
    pub fn vertices_2d(&self) -> Result<Vec<[f64; 2]>> {
        if self.dim() != 2 {
            return usage(format!("vertices_2d needs 2 variables, system has {}", self.dim()));
        }
        if self.has_contradiction(VERTEX_TOL) {
            return Ok(Vec::new());
        }
        let mut lines: Vec<([f64; 2], f64)> =
            self.rows.iter().filter(|r| !r.is_constant()).map(|r| { let c = r.coeffs_f64(); ([c[0], c[1]], r.rhs) }).collect();
        lines.push(([-1.0, 0.0], 0.0));
        lines.push(([0.0, -1.0], 0.0));
        let inside = |p: [f64; 2]| {
            p[0] >= -VERTEX_TOL
                && p[1] >= -VERTEX_TOL
                && lines.iter().all(|(a, b)| a[0] * p[0] + a[1] * p[1] <= b + VERTEX_TOL * (1.0 + b.abs()))
        };
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (a, b) = lines[i];
                let (c, d) = lines[j];
                let det = a[0] * c[1] - a[1] * c[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let p = [(b * c[1] - a[1] * d) / det, (a[0] * d - b * c[0]) / det];
                if inside(p) && !pts.iter().any(|q| (q[0] - p[0]).abs() <= VERTEX_TOL && (q[1] - p[1]).abs() <= VERTEX_TOL) {
                    pts.push([p[0].max(0.0), p[1].max(0.0)]);
                }
            }
        }
        if pts.len() > 2 {
            let cx = pts.iter().map(|p| p[0]).sum::<f64>() / pts.len() as f64;
            let cy = pts.iter().map(|p| p[1]).sum::<f64>() / pts.len() as f64;
            pts.sort_by(|p, q| {
                let ap = (p[1] - cy).atan2(p[0] - cx);
                let aq = (q[1] - cy).atan2(q[0] - cx);
                ap.total_cmp(&aq)
            });
        }
        if let Some(start) = (0..pts.len()).min_by(|&i, &j| {
            pts[i][1].total_cmp(&pts[j][1]).then(pts[i][0].total_cmp(&pts[j][0]))
        }) {
            pts.rotate_left(start);
        }
        Ok(pts)
    }
}

impl fmt::Display for InequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let terms: Vec<String> = r
                .coeffs
                .iter()
                .zip(&self.vars)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, v)| if c.is_one() { v.clone() } else { format!("{c}*{v}") })
                .collect();
            let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
            writeln!(f, "{lhs} <= {}", r.rhs)?;
        }
        Ok(())
    }
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("`{s}` is not a rational of the form num/den"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

#[derive(Serialize, Deserialize)]
struct RowFile {
    coefficients: Vec<String>,
    rhs: f64,
}

#[derive(Serialize, Deserialize)]
struct SystemFile {
    variables: Vec<String>,
    rows: Vec<RowFile>,
}

impl Serialize for InequalitySystem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemFile {
            variables: self.vars.clone(),
            rows: self
                .rows
                .iter()
                .map(|r| RowFile { coefficients: r.coeffs.iter().map(format_rational).collect(), rhs: r.rhs })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for InequalitySystem {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = SystemFile::deserialize(d)?;
        let mut rows = Vec::with_capacity(file.rows.len());
        for r in file.rows {
            let coeffs = r
                .coefficients
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>>>()
                .map_err(D::Error::custom)?;
            rows.push(Row::new(coeffs, r.rhs));
        }
        InequalitySystem::with_rows(file.variables, rows).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(vars: &[&str], rows: &[(&[i64], f64)]) -> InequalitySystem {
        let mut s = InequalitySystem::new(vars.iter().copied());
        for (c, b) in rows {
            s.push(Row::from_ints(c, *b)).unwrap();
        }
        s
    }

    #[test]
    fn normalization_makes_primitive_integers() {
        let r = Row::new(vec![BigRational::new(2.into(), 3.into()), BigRational::new(4.into(), 3.into())], 1.0);
        let n = r.normalized();
        assert_eq!(n.integer_key(), vec![BigInt::from(1), BigInt::from(2)]);
        assert!((n.rhs - 1.5).abs() < 1e-15);
    }

    #[test]
    fn eliminates_single_combination() {
        let s = sys(&["x", "y"], &[(&[1, 0], 1.0), (&[-1, 0], 0.0), (&[1, 1], 2.0)]);
        let e = s.eliminate_variable("x").unwrap();
        assert_eq!(e.vars(), &["y".to_string()]);
        // x + y <= 2 with -x <= 0 gives y <= 2; x <= 1 with -x <= 0 gives 0 <= 1 (dropped).
        assert_eq!(e.rows(), &[Row::from_ints(&[1], 2.0)]);
    }

    #[test]
    fn one_sided_variable_drops_its_rows() {
        let s = sys(&["x", "y"], &[(&[1, 0], 1.0), (&[1, 1], 2.0), (&[0, 1], 3.0)]);
        let e = s.eliminate_variable("x").unwrap();
        assert_eq!(e.rows(), &[Row::from_ints(&[1], 3.0)]);
    }

    #[test]
    fn contradiction_survives_elimination() {
        let s = sys(&["x"], &[(&[1], 1.0), (&[-1], -2.0)]);
        let e = s.eliminate_variable("x").unwrap();
        assert!(e.has_contradiction(1e-9));
        assert!(!e.is_feasible());
    }

    #[test]
    fn redundancy_removal_examples() {
        let s = sys(&["x"], &[(&[1], 1.0), (&[1], 2.0)]);
        assert_eq!(s.remove_redundant().rows(), &[Row::from_ints(&[1], 1.0)]);
        let s = sys(&["x", "y"], &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 3.0)]);
        assert_eq!(s.remove_redundant().rows().len(), 2);
    }

    #[test]
    fn vertices_of_box_and_pentagon() {
        let s = sys(&["a", "b"], &[(&[1, 0], 1.0), (&[0, 1], 1.0)]);
        assert_eq!(s.vertices_2d().unwrap(), vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        let s = sys(&["a", "b"], &[(&[1, 0], 1.0), (&[0, 1], 1.0), (&[1, 1], 1.5)]);
        let v = s.vertices_2d().unwrap();
        let want = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 1.0]];
        assert_eq!(v.len(), want.len());
        for (p, q) in v.iter().zip(&want) {
            assert!((p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn vertices_of_infeasible_system_are_empty() {
        let s = sys(&["a", "b"], &[(&[0, 0], -1.0)]);
        assert!(s.vertices_2d().unwrap().is_empty());
    }

    #[test]
    fn substitution_of_sum_variable() {
        // x = y + z, x <= 1  ->  y + z <= 1
        let s = sys(&["x", "y", "z"], &[(&[1, 0, 0], 1.0)]);
        let one = BigRational::one();
        let out = s.substitute(0, &[BigRational::zero(), one.clone(), one], 0.0).unwrap();
        assert_eq!(out.rows(), &[Row::from_ints(&[1, 1], 1.0)]);
    }

    #[test]
    fn json_round_trip_uses_fraction_strings() {
        let mut s = InequalitySystem::new(["x", "y"]);
        s.push(Row::new(vec![BigRational::new(1.into(), 2.into()), BigRational::from_integer((-3).into())], 0.25))
            .unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.contains("\"1/2\"") && text.contains("\"-3/1\""), "{text}");
        let back: InequalitySystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
