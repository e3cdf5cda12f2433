use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::region::{RegionExpr, Verdict};

/// Precision of the bisection along each grid column.
pub const BOUNDARY_PRECISION: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub r1: f64,
    pub r2: f64,
}

fn inside(region: &RegionExpr, r1: f64, r2: f64, tol: f64) -> Verdict {
    let (relaxed, tight) = region.test(&[r1, r2], tol);
    match (relaxed, tight) {
        (_, true) => Verdict::Inside,
        (true, false) => Verdict::Boundary,
        _ => Verdict::Outside,
    }
}

/// Upper envelope `R2_max(R1)` of a downward-closed planar region.
///
/// Columns are `R1 = i * r1_max / (grid - 1)`. Columns whose foot `(R1, 0)`
/// is not Inside are omitted. Regions unbounded in `R2` are clipped at
/// `r2_cap`.
pub fn boundary_2d(region: &RegionExpr, grid: usize, r1_max: f64, r2_cap: f64, tol: f64) -> Result<Vec<BoundaryPoint>> {
    if region.dim() != Some(2) {
        return usage("boundary extraction needs a two-dimensional region");
    }
    if grid < 2 || r1_max.is_nan() || r1_max <= 0.0 || r2_cap.is_nan() || r2_cap <= 0.0 {
        return usage("boundary extraction needs grid >= 2 and positive extents");
    }
    let columns: Vec<Result<Option<BoundaryPoint>>> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let r1 = r1_max * i as f64 / (grid - 1) as f64;
            if inside(region, r1, 0.0, tol) != Verdict::Inside {
                return Ok(None);
            }
            let r2 = if inside(region, r1, r2_cap, tol) == Verdict::Inside {
                r2_cap
            } else {
                let (mut lo, mut hi) = (0.0, r2_cap);
                while hi - lo > BOUNDARY_PRECISION {
                    let mid = 0.5 * (lo + hi);
                    if inside(region, r1, mid, tol) == Verdict::Inside {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                lo
            };
            for (f, g) in [(0.0, 1.0), (0.5, 1.0), (1.0, 0.5), (0.5, 0.5)] {
                if inside(region, r1 * f, r2 * g, tol) == Verdict::Outside {
                    return Err(Error::Consistency(format!(
                        "region is not downward closed: ({r1}, {r2}) is inside but ({}, {}) is outside",
                        r1 * f,
                        r2 * g
                    )));
                }
            }
            Ok(Some(BoundaryPoint { r1, r2 }))
        })
        .collect();
    let mut out = Vec::new();
    for c in columns {
        if let Some(p) = c? {
            out.push(p);
        }
    }
    Ok(out)
}

pub fn boundary_csv(points: &[BoundaryPoint]) -> String {
    let mut s = String::from("r1,r2\n");
    for p in points {
        let _ = writeln!(s, "{},{}", p.r1, p.r2);
    }
    s
}

/// A bare SVG polyline of the envelope closed down to the axes.
pub fn boundary_svg(points: &[BoundaryPoint]) -> String {
    const SIZE: f64 = 400.0;
    const MARGIN: f64 = 20.0;
    let xmax = points.iter().map(|p| p.r1).fold(1e-9, f64::max);
    let ymax = points.iter().map(|p| p.r2).fold(1e-9, f64::max);
    let scale = (SIZE - 2.0 * MARGIN) / xmax.max(ymax);
    let map = |x: f64, y: f64| (MARGIN + x * scale, SIZE - MARGIN - y * scale);
    let mut pts = String::new();
    let mut push = |x: f64, y: f64| {
        let (u, v) = map(x, y);
        let _ = write!(pts, "{u:.2},{v:.2} ");
    };
    push(0.0, 0.0);
    for p in points {
        push(p.r1, p.r2);
    }
    if let Some(last) = points.last() {
        push(last.r1, 0.0);
    }
    push(0.0, 0.0);
    let (ox, oy) = map(0.0, 0.0);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\">\n\
         <line x1=\"{ox}\" y1=\"{oy}\" x2=\"{}\" y2=\"{oy}\" stroke=\"gray\"/>\n\
         <line x1=\"{ox}\" y1=\"{oy}\" x2=\"{ox}\" y2=\"{MARGIN}\" stroke=\"gray\"/>\n\
         <polyline points=\"{}\" fill=\"none\" stroke=\"black\"/>\n</svg>\n",
        SIZE - MARGIN,
        pts.trim_end()
    )
}
