//! Search for a deterministic two-user-pair channel with uniform quaternary
//! inputs whose optimal region is not convex, and write the witness to
//! `tests/fixtures/nonconvex.json`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rrk::prob::schema::NetworkFile;
use rrk::prob::{build_joint, InputEnsemble};
use rrk::random::random_deterministic_spec;
use rrk::region::{boundary_2d, member, optimal_region, Verdict};
use rrk::SenderSet;

/// Required clearance of the witness points from every facet.
const MARGIN: f64 = 1e-3;

fn main() -> anyhow::Result<()> {
    let ens = InputEnsemble::uniform(&[4, 4])?;
    let demands = vec![SenderSet::singleton(0), SenderSet::singleton(1)];
    let mut best: Option<(f64, serde_json::Value)> = None;
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = random_deterministic_spec(&mut rng, &[4, 4], &[4, 4], demands.clone())?;
        let joint = build_joint(&spec, &ens)?;
        let region = optimal_region(&joint, &spec)?;
        let edge = boundary_2d(&region, 120, 2.0, 2.0, 1e-9)?;
        // Pull boundary points inward so they clear the facets.
        let pts: Vec<[f64; 2]> = edge.iter().map(|p| [p.r1, (p.r2 - 2.0 * MARGIN).max(0.0)]).collect();
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                if member(&region, a, MARGIN)? != Verdict::Inside
                    || member(&region, b, MARGIN)? != Verdict::Inside
                    || member(&region, &mid, MARGIN)? != Verdict::Outside
                {
                    continue;
                }
                // Depth of the dent: how far the midpoint sits above the envelope.
                let depth = (1..=200)
                    .map(|s| MARGIN * s as f64)
                    .take_while(|&d| member(&region, &[mid[0], (mid[1] - d).max(0.0)], MARGIN).unwrap() == Verdict::Outside)
                    .last()
                    .unwrap_or(0.0);
                if best.as_ref().is_none_or(|(d, _)| depth > *d) {
                    let doc = serde_json::json!({
                        "seed": seed,
                        "network": NetworkFile::from_spec(&spec, Some(&ens)),
                        "a": a,
                        "b": b,
                        "midpoint": mid,
                    });
                    best = Some((depth, doc));
                }
            }
        }
        if let Some((d, _)) = &best {
            if *d > 0.05 {
                break;
            }
        }
    }
    let (depth, doc) = best.ok_or_else(|| anyhow::anyhow!("no nonconvex instance found"))?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/nonconvex.json");
    std::fs::create_dir_all(std::path::Path::new(path).parent().unwrap())?;
    std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
    println!("dent depth {depth:.3} bits, written to {path}");
    Ok(())
}
