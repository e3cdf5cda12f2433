//! Han–Kobayashi rate splitting over a two-user-pair interference channel.
//!
//! Each sender splits its message into two parts carried by virtual inputs
//! `U11, U12` (sender 1) and `U21, U22` (sender 2), which are mapped to the
//! physical inputs by deterministic tables. Receiver 1 wants `{U11, U12}`,
//! receiver 2 wants `{U21, U22}`; in the usual scheme `U12` and `U21` are the
//! parts also decoded at the other receiver.
//!
//! Virtual input indices are fixed as `U11 = 0, U12 = 1, U21 = 2, U22 = 3`,
//! and the split-rate variables are named `R11, R12, R21, R22` to match.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, usage, Error, Result};
use crate::polytope::{InequalitySystem, Row};
use crate::prob::schema::NetworkFile;
use crate::prob::{build_joint, compose_virtual_channel, InputEnsemble, JointDistribution, NetworkSpec, VirtualMap};
use crate::region::{LinearRateInequality, Polytope, ReceiverInfo, RegionExpr, Verdict};
use crate::sets::SenderSet;

pub const U11: usize = 0;
pub const U12: usize = 1;
pub const U21: usize = 2;
pub const U22: usize = 3;

pub const SPLIT_VARS: [&str; 4] = ["R11", "R12", "R21", "R22"];

/// Default membership band used when comparing planar HK regions.
pub const GRID_BAND: f64 = 1e-6;

fn u(idx: &[usize]) -> SenderSet {
    SenderSet::from_indices(idx.iter().copied())
}

/// A rate-split ensemble over a base 2-user-pair channel.
#[derive(Clone, Debug)]
pub struct HKEnsemble {
    base: NetworkSpec,
    virtual_ensemble: InputEnsemble,
    map1: Vec<usize>,
    map2: Vec<usize>,
    composed: NetworkSpec,
    joint: JointDistribution,
    info: [ReceiverInfo; 2],
}

impl HKEnsemble {
    /// `map1[u11 * |U12| + u12] = x1`, `map2[u21 * |U22| + u22] = x2`.
    pub fn new(base: NetworkSpec, virtual_ensemble: InputEnsemble, map1: Vec<usize>, map2: Vec<usize>) -> Result<Self> {
        if base.senders() != 2 || base.receivers() != 2 {
            return config("Han–Kobayashi needs a base channel with 2 senders and 2 receivers");
        }
        if virtual_ensemble.senders() != 4 {
            return config(format!("expected 4 virtual inputs, got {}", virtual_ensemble.senders()));
        }
        let sizes = virtual_ensemble.x_sizes().to_vec();
        let maps = [
            VirtualMap { inputs: vec![U11, U12], table: map1.clone() },
            VirtualMap { inputs: vec![U21, U22], table: map2.clone() },
        ];
        let composed = compose_virtual_channel(&base, &sizes, &maps, vec![u(&[U11, U12]), u(&[U21, U22])])?;
        let joint = build_joint(&composed, &virtual_ensemble)?;
        let info = [ReceiverInfo::new(&joint, 0)?, ReceiverInfo::new(&joint, 1)?];
        Ok(HKEnsemble { base, virtual_ensemble, map1, map2, composed, joint, info })
    }

    pub fn base(&self) -> &NetworkSpec {
        &self.base
    }

    pub fn virtual_ensemble(&self) -> &InputEnsemble {
        &self.virtual_ensemble
    }

    pub fn maps(&self) -> (&[usize], &[usize]) {
        (&self.map1, &self.map2)
    }

    /// The `(4, 2)` network over the virtual inputs.
    pub fn composed(&self) -> &NetworkSpec {
        &self.composed
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    /// Entropy cache for receiver `l` (0 or 1) of the composed network.
    pub fn info(&self, receiver: usize) -> &ReceiverInfo {
        &self.info[receiver]
    }

    /// Induced physical input pmfs `p(x_k | q)`, for cross-checks against the base channel.
    pub fn physical_ensemble(&self) -> Result<InputEnsemble> {
        let e = &self.virtual_ensemble;
        let sz = e.x_sizes();
        let phys = self.base.input_sizes();
        let mut rows = vec![Vec::new(), Vec::new()];
        for q in 0..e.q_size() {
            for (k, (map, (a, b))) in [(&self.map1, (U11, U12)), (&self.map2, (U21, U22))].into_iter().enumerate() {
                let mut px = vec![0.0; phys[k]];
                for ua in 0..sz[a] {
                    for ub in 0..sz[b] {
                        px[map[ua * sz[b] + ub]] += e.p_x_given_q(a, q)[ua] * e.p_x_given_q(b, q)[ub];
                    }
                }
                rows[k].push(px);
            }
        }
        InputEnsemble::new(e.p_q().to_vec(), rows)
    }
}

/// Rows `R_T <= I(U_T; Y_l | U_{S\T}, Q)` for nonempty `T` in `s`, listed by
/// size and then by the given member order.
fn mac_rows(info: &ReceiverInfo, order: &[usize]) -> Vec<Row> {
    let s = u(order);
    let mut ts: Vec<Vec<usize>> = Vec::new();
    for mask in 1u32..(1 << order.len()) {
        ts.push((0..order.len()).filter(|i| mask >> i & 1 == 1).map(|i| order[i]).collect());
    }
    ts.sort_by(|a, b| {
        let pa: Vec<usize> = a.iter().map(|x| order.iter().position(|y| y == x).unwrap()).collect();
        let pb: Vec<usize> = b.iter().map(|x| order.iter().position(|y| y == x).unwrap()).collect();
        a.len().cmp(&b.len()).then(pa.cmp(&pb))
    });
    ts.into_iter()
        .map(|t| {
            let ts = u(&t);
            let coeffs: Vec<i64> = (0..4).map(|i| i64::from(ts.contains(i))).collect();
            Row::from_ints(&coeffs, info.mi(ts, s.difference(ts)))
        })
        .collect()
}

fn split_system(rows: Vec<Row>) -> InequalitySystem {
    InequalitySystem::with_rows(SPLIT_VARS.iter().map(|s| s.to_string()).collect(), rows)
        .expect("four coefficients per row")
}

/// The seven split-rate constraints of receiver `l` (0 or 1).
///
/// Receiver 1 decodes `{U11, U12, U21}`; receiver 2 decodes `{U22, U21, U12}`,
/// the same list under the exchange of the user indices.
pub fn hk_receiver_system(ens: &HKEnsemble, receiver: usize) -> Result<InequalitySystem> {
    let order: &[usize] = match receiver {
        0 => &[U11, U12, U21],
        1 => &[U22, U21, U12],
        _ => return usage("Han–Kobayashi receivers are 0 and 1"),
    };
    Ok(split_system(mac_rows(&ens.info[receiver], order)))
}

/// Split-rate MAC system for decoding `s` at receiver `l`.
pub fn split_mac_system(ens: &HKEnsemble, receiver: usize, s: SenderSet) -> Result<InequalitySystem> {
    if receiver > 1 || s.is_empty() || !s.is_subset(SenderSet::full(4)) {
        return usage("invalid receiver or decode set for a split-rate MAC system");
    }
    let order: Vec<usize> = s.iter().collect();
    Ok(split_system(mac_rows(&ens.info[receiver], &order)))
}

/// Project a split-rate system onto `(R1, R2) = (R11 + R12, R21 + R22)`.
///
/// Split rates are constrained nonnegative before elimination; the result
/// carries no explicit nonnegativity rows on `R1, R2`.
pub fn project_split_system(split: &InequalitySystem) -> Result<InequalitySystem> {
    if split.vars() != SPLIT_VARS {
        return usage("expected a system over R11, R12, R21, R22");
    }
    let vars: Vec<String> = ["R1", "R2"].iter().chain(SPLIT_VARS.iter()).map(|s| s.to_string()).collect();
    let mut sys = InequalitySystem::new(vars);
    let zero = BigRational::zero;
    for r in split.rows() {
        let mut coeffs = vec![zero(), zero()];
        coeffs.extend(r.coeffs.iter().cloned());
        sys.push(Row::new(coeffs, r.rhs))?;
    }
    let one = BigRational::one;
    sys.push_equality(vec![one(), zero(), -one(), -one(), zero(), zero()], 0.0)?;
    sys.push_equality(vec![zero(), one(), zero(), zero(), -one(), -one()], 0.0)?;
    for v in 0..6 {
        sys.push_nonnegative(v)?;
    }
    let projected = sys.eliminate_all(&SPLIT_VARS)?.remove_redundant();
    let rows = projected
        .rows()
        .iter()
        .filter(|r| !is_plain_nonnegativity(r))
        .cloned()
        .collect();
    InequalitySystem::with_rows(projected.vars().to_vec(), rows)
}

fn is_plain_nonnegativity(r: &Row) -> bool {
    let negatives = r.coeffs.iter().filter(|c| **c == -BigRational::one()).count();
    let zeros = r.coeffs.iter().filter(|c| c.is_zero()).count();
    negatives == 1 && zeros + 1 == r.coeffs.len() && r.rhs == 0.0
}

/// Planar projection of `HK1 ∩ HK2`.
#[derive(Clone, Debug)]
pub struct HkProjection {
    pub system: InequalitySystem,
    pub polytope: Polytope,
}

pub fn hk_region_2d(ens: &HKEnsemble) -> Result<HkProjection> {
    let mut rows = hk_receiver_system(ens, 0)?.rows().to_vec();
    rows.extend(hk_receiver_system(ens, 1)?.rows().iter().cloned());
    let system = project_split_system(&split_system(rows))?;
    let polytope = Polytope::from_system(&system, "HK")?;
    Ok(HkProjection { system, polytope })
}

/// The seven-inequality compact description with patterns
/// `(1,0), (0,1), (1,1) x3, (2,1), (1,2)`.
pub fn chong_motani_region(ens: &HKEnsemble) -> Result<Polytope> {
    let i1 = |t: &[usize], c: &[usize]| ens.info[0].mi(u(t), u(c));
    let i2 = |t: &[usize], c: &[usize]| ens.info[1].mi(u(t), u(c));
    let rows = [
        ([1, 0], i1(&[U11, U12], &[U21])),
        ([0, 1], i2(&[U21, U22], &[U12])),
        ([1, 1], i1(&[U11, U12, U21], &[]) + i2(&[U22], &[U12, U21])),
        ([1, 1], i2(&[U12, U21, U22], &[]) + i1(&[U11], &[U12, U21])),
        ([1, 1], i1(&[U11, U21], &[U12]) + i2(&[U12, U22], &[U21])),
        ([2, 1], i1(&[U11, U12, U21], &[]) + i1(&[U11], &[U12, U21]) + i2(&[U12, U22], &[U21])),
        ([1, 2], i2(&[U12, U21, U22], &[]) + i2(&[U22], &[U12, U21]) + i1(&[U11, U21], &[U12])),
    ];
    let rows = rows
        .iter()
        .map(|(c, b)| {
            LinearRateInequality::new(c.iter().map(|&v| BigRational::from_integer(v.into())).collect(), *b)
        })
        .collect::<Result<Vec<_>>>()?;
    Polytope::new(2, rows, "CM")
}

/// One `(S1, S2)` decode-set choice and its planar projection.
#[derive(Clone, Debug)]
pub struct HkCase {
    pub s1: SenderSet,
    pub s2: SenderSet,
    pub system: InequalitySystem,
    pub polytope: Polytope,
}

/// Human-readable label of a virtual-input set, e.g. `{11,12,21}`.
pub fn split_label(s: SenderSet) -> String {
    const NAMES: [&str; 4] = ["11", "12", "21", "22"];
    let parts: Vec<&str> = s.iter().map(|i| NAMES[i]).collect();
    format!("{{{}}}", parts.join(","))
}

#[derive(Clone, Debug)]
pub struct ROpt {
    pub cases: Vec<HkCase>,
    pub region: RegionExpr,
}

/// Union over the 16 choices `S1 ⊇ {11,12}`, `S2 ⊇ {21,22}` of the projected
/// intersection of the two split-rate MAC systems.
pub fn r_opt_2d(ens: &HKEnsemble) -> Result<ROpt> {
    let pairs: Vec<(SenderSet, SenderSet)> = u(&[U11, U12])
        .supersets(4)
        .flat_map(|s1| u(&[U21, U22]).supersets(4).map(move |s2| (s1, s2)))
        .collect();
    let cases = pairs
        .par_iter()
        .map(|&(s1, s2)| {
            let mut rows = split_mac_system(ens, 0, s1)?.rows().to_vec();
            rows.extend(split_mac_system(ens, 1, s2)?.rows().iter().cloned());
            let system = project_split_system(&split_system(rows))?;
            let label = format!("S1={} S2={}", split_label(s1), split_label(s2));
            let polytope = Polytope::from_system(&system, label)?;
            Ok(HkCase { s1, s2, system, polytope })
        })
        .collect::<Result<Vec<_>>>()?;
    let region = RegionExpr::Union(cases.iter().map(|c| RegionExpr::Leaf(c.polytope.clone())).collect());
    Ok(ROpt { cases, region })
}

/// Square grid `[0, extent]^2` sampled at cell centers.
pub fn grid_points(grid: usize, extent: f64) -> Vec<[f64; 2]> {
    let step = extent / grid as f64;
    (0..grid)
        .flat_map(|i| (0..grid).map(move |j| [(i as f64 + 0.5) * step, (j as f64 + 0.5) * step]))
        .collect()
}

/// `1.1` times the largest single-rate bound of the compact form.
pub fn default_extent(ens: &HKEnsemble) -> Result<f64> {
    let cm = chong_motani_region(ens)?;
    let m = cm.rows()[0].rhs().max(cm.rows()[1].rhs());
    Ok(1.1 * m.max(1e-3))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridDiff {
    pub points: usize,
    /// Points where either side is within the band of a facet.
    pub in_band: usize,
    /// Off-band points where the two regions disagree.
    pub disagreements: usize,
    pub first_disagreement: Option<[f64; 2]>,
}

/// Compare two planar regions point by point, ignoring band points.
/// With `inclusion_only`, only points inside `a` but outside `b` count.
pub fn grid_compare(a: &RegionExpr, b: &RegionExpr, points: &[[f64; 2]], band: f64, inclusion_only: bool) -> GridDiff {
    let verdicts: Vec<(Verdict, Verdict)> = points
        .par_iter()
        .map(|p| (verdict(a, p, band), verdict(b, p, band)))
        .collect();
    let mut diff = GridDiff { points: points.len(), ..GridDiff::default() };
    for (p, (va, vb)) in points.iter().zip(verdicts) {
        if va == Verdict::Boundary || vb == Verdict::Boundary {
            diff.in_band += 1;
            continue;
        }
        let bad = if inclusion_only { va == Verdict::Inside && vb == Verdict::Outside } else { va != vb };
        if bad {
            diff.disagreements += 1;
            diff.first_disagreement.get_or_insert(*p);
        }
    }
    diff
}

fn verdict(r: &RegionExpr, p: &[f64; 2], tol: f64) -> Verdict {
    match r.test(p, tol) {
        (_, true) => Verdict::Inside,
        (true, false) => Verdict::Boundary,
        _ => Verdict::Outside,
    }
}

/// Cover–van der Meulen style region `R1 <= I(U1;Y1|Q), R2 <= I(U2;Y2|Q)` of
/// a two-input network where each receiver treats the other input as noise.
pub fn treat_as_noise_region(joint: &JointDistribution) -> Result<Polytope> {
    let i1 = ReceiverInfo::new(joint, 0)?;
    let i2 = ReceiverInfo::new(joint, 1)?;
    Polytope::new(
        2,
        vec![
            LinearRateInequality::sum_over(SenderSet::singleton(0), 2, i1.mi(SenderSet::singleton(0), SenderSet::EMPTY))?,
            LinearRateInequality::sum_over(SenderSet::singleton(1), 2, i2.mi(SenderSet::singleton(1), SenderSet::EMPTY))?,
        ],
        "cover-van-der-meulen",
    )
}

/// Superposition region: receiver 1 decodes both inputs, receiver 2 treats
/// input 1 as noise.
pub fn superposition_region(joint: &JointDistribution) -> Result<Polytope> {
    let i1 = ReceiverInfo::new(joint, 0)?;
    let i2 = ReceiverInfo::new(joint, 1)?;
    let (a, b) = (SenderSet::singleton(0), SenderSet::singleton(1));
    Polytope::new(
        2,
        vec![
            LinearRateInequality::sum_over(a, 2, i1.mi(a, b))?,
            LinearRateInequality::sum_over(b, 2, i2.mi(b, SenderSet::EMPTY))?,
            LinearRateInequality::sum_over(a.union(b), 2, i1.mi(a.union(b), SenderSet::EMPTY))?,
        ],
        "superposition",
    )
}

/// JSON layout of an HK ensemble: a base network plus the virtual inputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HkFile {
    pub network: NetworkFile,
    /// Alphabet sizes of `U11, U12, U21, U22`.
    pub u_alphabet_sizes: [usize; 4],
    /// `map1[u11][u12] = x1`.
    pub map1: Vec<Vec<usize>>,
    /// `map2[u21][u22] = x2`.
    pub map2: Vec<Vec<usize>>,
    pub q_size: usize,
    pub p_q: Vec<f64>,
    /// Four matrices `p(u | q)` in the order `U11, U12, U21, U22`.
    pub p_u_given_q: Vec<Vec<Vec<f64>>>,
}

impl HkFile {
    pub fn to_ensemble(&self) -> Result<HKEnsemble> {
        let base = self.network.to_spec()?;
        if self.p_q.len() != self.q_size {
            return Err(Error::Parse(format!("field `p_q`: {} entries but q_size = {}", self.p_q.len(), self.q_size)));
        }
        let ens = InputEnsemble::new(self.p_q.clone(), self.p_u_given_q.clone())?;
        if ens.x_sizes() != self.u_alphabet_sizes {
            return Err(Error::Parse("field `p_u_given_q` disagrees with `u_alphabet_sizes`".into()));
        }
        let flatten = |name: &str, m: &[Vec<usize>], rows: usize, cols: usize| -> Result<Vec<usize>> {
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(Error::Parse(format!("field `{name}` must be a {rows} x {cols} table")));
            }
            Ok(m.concat())
        };
        let s = self.u_alphabet_sizes;
        let map1 = flatten("map1", &self.map1, s[0], s[1])?;
        let map2 = flatten("map2", &self.map2, s[2], s[3])?;
        HKEnsemble::new(base, ens, map1, map2)
    }

    pub fn from_ensemble(ens: &HKEnsemble) -> Self {
        let e = ens.virtual_ensemble();
        let s = e.x_sizes();
        let (m1, m2) = ens.maps();
        HkFile {
            network: NetworkFile::from_spec(ens.base(), None),
            u_alphabet_sizes: [s[0], s[1], s[2], s[3]],
            map1: m1.chunks(s[1]).map(<[usize]>::to_vec).collect(),
            map2: m2.chunks(s[3]).map(<[usize]>::to_vec).collect(),
            q_size: e.q_size(),
            p_q: e.p_q().to_vec(),
            p_u_given_q: (0..4).map(|k| e.conditional_rows(k)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Binary two-user-pair channel with product output noise.
    pub(crate) fn small_ic() -> NetworkSpec {
        // Each output mostly follows its own sender, nudged by the other.
        let mut ch = Vec::new();
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                let p1 = if x1 == 1 { 0.8 - 0.2 * x2 as f64 } else { 0.1 + 0.15 * x2 as f64 };
                let p2 = if x2 == 1 { 0.85 } else { 0.2 + 0.1 * x1 as f64 };
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        let a = if y1 == 1 { p1 } else { 1.0 - p1 };
                        let b = if y2 == 1 { p2 } else { 1.0 - p2 };
                        ch.push(a * b);
                    }
                }
            }
        }
        NetworkSpec::new(&[2, 2], &[2, 2], ch, vec![SenderSet::singleton(0), SenderSet::singleton(1)]).unwrap()
    }

    fn degenerate(base: NetworkSpec) -> HKEnsemble {
        // U12, U21 constant; U11 = X1, U22 = X2.
        let ens = InputEnsemble::iid(&[vec![0.5, 0.5], vec![1.0], vec![1.0], vec![0.5, 0.5]]).unwrap();
        HKEnsemble::new(base, ens, vec![0, 1], vec![0, 1]).unwrap()
    }

    #[test]
    fn degenerate_common_parts_have_zero_rhs() {
        let e = degenerate(small_ic());
        let s = hk_receiver_system(&e, 0).unwrap();
        assert_eq!(s.rows().len(), 7);
        // Rows 2 (R12), 3 (R21) and 6 (R12 + R21) involve only constant inputs.
        for i in [1, 2, 5] {
            assert!(s.rows()[i].rhs.abs() < 1e-12, "row {i}: {}", s.rows()[i].rhs);
        }
    }

    #[test]
    fn degenerate_projection_is_a_rectangle() {
        let e = degenerate(small_ic());
        let hk = hk_region_2d(&e).unwrap();
        let v = hk.system.vertices_2d().unwrap();
        let i1 = e.info(0).mi(u(&[U11, U12]), SenderSet::EMPTY);
        let i2 = e.info(1).mi(u(&[U21, U22]), SenderSet::EMPTY);
        let want = [[0.0, 0.0], [i1, 0.0], [i1, i2], [0.0, i2]];
        assert_eq!(v.len(), 4, "{v:?}");
        for (p, q) in v.iter().zip(want) {
            assert!((p[0] - q[0]).abs() < 1e-9 && (p[1] - q[1]).abs() < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn compact_form_has_seven_rows_with_fixed_patterns() {
        let e = degenerate(small_ic());
        let cm = chong_motani_region(&e).unwrap();
        let pats: Vec<Vec<f64>> = cm
            .rows()
            .iter()
            .map(|r| r.coeffs().iter().map(crate::polytope::rational_to_f64).collect())
            .collect();
        assert_eq!(pats, vec![vec![1., 0.], vec![0., 1.], vec![1., 1.], vec![1., 1.], vec![1., 1.], vec![2., 1.], vec![1., 2.]]);
    }

    #[test]
    fn sixteen_cases() {
        let e = degenerate(small_ic());
        let r = r_opt_2d(&e).unwrap();
        assert_eq!(r.cases.len(), 16);
        assert_eq!(split_label(r.cases[0].s1), "{11,12}");
    }

    #[test]
    fn file_round_trip() {
        let e = degenerate(small_ic());
        let f = HkFile::from_ensemble(&e);
        let text = serde_json::to_string(&f).unwrap();
        let back: HkFile = serde_json::from_str(&text).unwrap();
        let e2 = back.to_ensemble().unwrap();
        assert_eq!(e2.composed(), e.composed());
    }
}
