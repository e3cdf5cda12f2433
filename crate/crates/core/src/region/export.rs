use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::region::{Polytope, RegionExpr};

fn polytope_json(p: &Polytope) -> Value {
    let rows: Vec<Value> = p
        .rows()
        .iter()
        .map(|r| {
            let coeffs: Vec<Value> = r
                .coeffs()
                .iter()
                .map(|c| match (c.numer().to_i64(), c.denom().to_i64()) {
                    (Some(n), Some(d)) => json!([n, d]),
                    _ => json!([c.numer().to_string(), c.denom().to_string()]),
                })
                .collect();
            json!({ "coefficients": coeffs, "rhs": r.rhs() })
        })
        .collect();
    json!({
        "type": "polytope",
        "label": p.label(),
        "dim": p.dim(),
        "inequalities": rows,
        "contradictory": p.is_contradictory(),
    })
}

/// Expression tree with polytope leaves; coefficients are `[num, den]` pairs.
pub fn region_to_json(region: &RegionExpr) -> Value {
    match region {
        RegionExpr::Leaf(p) => polytope_json(p),
        RegionExpr::Union(c) => json!({ "type": "union", "children": c.iter().map(region_to_json).collect::<Vec<_>>() }),
        RegionExpr::Intersection(c) => {
            json!({ "type": "intersection", "children": c.iter().map(region_to_json).collect::<Vec<_>>() })
        }
    }
}
