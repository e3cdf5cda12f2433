use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrk::hk::{hk_receiver_system, hk_region_2d};
use rrk::polytope::{InequalitySystem, Row};
use rrk::prob::{InputEnsemble, NetworkSpec};
use rrk::SenderSet;

fn random_system(seed: u64) -> InequalitySystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sys = InequalitySystem::new(["x", "y", "z", "w"]);
    for _ in 0..rng.gen_range(2..=6) {
        let c: Vec<i64> = (0..4).map(|_| rng.gen_range(-2..=2)).collect();
        sys.push(Row::from_ints(&c, rng.gen_range(-0.5..2.0))).unwrap();
    }
    for v in 0..4 {
        sys.push_nonnegative(v).unwrap();
    }
    sys
}

fn grid() -> impl Iterator<Item = [f64; 2]> {
    (0..=20).flat_map(|i| (0..=20).map(move |j| [i as f64 * 0.1, j as f64 * 0.1]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>()) {
        let sys = random_system(seed);
        let zw = sys.eliminate_all(&["z", "w"]).unwrap();
        let wz = sys.eliminate_all(&["w", "z"]).unwrap();
        for p in grid() {
            // Compare away from the band where rounding could flip a verdict.
            let (a_in, a_out) = (zw.satisfies(&p, -1e-7), !zw.satisfies(&p, 1e-7));
            let (b_in, b_out) = (wz.satisfies(&p, -1e-7), !wz.satisfies(&p, 1e-7));
            prop_assert!(!(a_in && b_out) && !(a_out && b_in), "at {p:?}");
        }
    }

    #[test]
    fn redundancy_removal_preserves_the_set(seed in any::<u64>()) {
        let proj = random_system(seed).eliminate_all(&["z", "w"]).unwrap();
        let lean = proj.remove_redundant();
        prop_assert!(lean.rows().len() <= proj.rows().len());
        for p in grid() {
            prop_assert!(!(proj.satisfies(&p, -1e-7) && !lean.satisfies(&p, 1e-7)), "at {p:?}");
            prop_assert!(!(lean.satisfies(&p, -1e-7) && !proj.satisfies(&p, 1e-7)), "at {p:?}");
        }
    }

    #[test]
    fn projection_contains_the_shadow_of_feasible_points(seed in any::<u64>(), pts in proptest::collection::vec(proptest::array::uniform4(0.0f64..2.0), 50)) {
        let sys = random_system(seed);
        let proj = sys.eliminate_all(&["z", "w"]).unwrap();
        for p in pts {
            if sys.satisfies(&p, 0.0) {
                prop_assert!(proj.satisfies(&p[..2], 1e-9));
            }
        }
    }
}

/// Binary two-user-pair channel with product output noise.
fn small_ic() -> NetworkSpec {
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

#[test]
fn hk_projection_agrees_with_a_split_rate_grid_lift() {
    // x_k = u_k1 xor u_k2 with independent binary splits.
    let ens = InputEnsemble::iid(&[vec![0.8, 0.2], vec![0.7, 0.3], vec![0.6, 0.4], vec![0.75, 0.25]]).unwrap();
    let e = rrk::hk::HKEnsemble::new(small_ic(), ens, vec![0, 1, 1, 0], vec![0, 1, 1, 0]).unwrap();
    let mut rows = hk_receiver_system(&e, 0).unwrap().rows().to_vec();
    rows.extend(hk_receiver_system(&e, 1).unwrap().rows().iter().cloned());
    let split = InequalitySystem::with_rows(["R11", "R12", "R21", "R22"].map(String::from).to_vec(), rows).unwrap();
    let proj = hk_region_2d(&e).unwrap().system;

    let step = 0.01;
    let lift = |r1: f64, r2: f64, slack: f64| {
        let steps = |r: f64| (r / step).floor() as usize;
        (0..=steps(r1)).any(|a| {
            let r11 = (a as f64 * step).min(r1);
            (0..=steps(r2)).any(|b| {
                let r21 = (b as f64 * step).min(r2);
                split.satisfies(&[r11, r1 - r11, r21, r2 - r21], slack)
            })
        })
    };
    let (mut inside, mut checked) = (0, 0);
    for i in 0..=30 {
        for j in 0..=30 {
            let (r1, r2) = (i as f64 * 0.02, j as f64 * 0.02);
            if proj.satisfies(&[r1, r2], -1e-6) {
                inside += 1;
                // Snapping a split to the grid moves each row by at most 2 * step.
                assert!(lift(r1, r2, 2.0 * step + 1e-9), "({r1}, {r2}) has no lift");
            }
            if lift(r1, r2, -1e-6) {
                checked += 1;
                assert!(proj.satisfies(&[r1, r2], 1e-9), "lift at ({r1}, {r2}) not in projection");
            }
        }
    }
    assert!(inside > 10 && checked > 10, "{inside} {checked}\n{split}\n{proj}");
}
