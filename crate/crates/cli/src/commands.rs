use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use rrk::decodable::{check_union_closure, decodable_set_report, maximal_set, prop2_certificate};
use rrk::hk::{
    chong_motani_region, default_extent, grid_compare, grid_points, hk_receiver_system, hk_region_2d, r_opt_2d,
    split_label, U11, U12, U21, U22,
};
use rrk::prob::{build_joint, JointDistribution, NetworkSpec};
use rrk::region::{
    boundary_2d, boundary_csv, boundary_svg, member, optimal_region, region_to_json, MinForm, ReceiverInfo,
    RegionExpr, Verdict, MAX_UNION_SENDERS,
};
use rrk::sim::{exact_error, monte_carlo_error, CodeSource, DecoderKind, ErrorReport, Simulator};
use rrk::{Error, SenderSet};

use crate::io::{emit, load_hk, load_network, write_atomic};
use crate::{EquivArgs, Form, HkArgs, InfoArgs, MethodArg, RegionArgs, SimulateArgs};

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol.is_finite()) {
        bail!(Error::Usage(format!("--tol must be positive, got {tol}")));
    }
    Ok(())
}

/// 0-based receivers selected by an optional 1-based flag.
fn receivers(spec: &NetworkSpec, receiver: Option<usize>) -> Result<Vec<usize>> {
    match receiver {
        None => Ok((0..spec.receivers()).collect()),
        Some(r) if r >= 1 && r <= spec.receivers() => Ok(vec![r - 1]),
        Some(r) => bail!(Error::Usage(format!("--receiver {r} out of range 1..={}", spec.receivers()))),
    }
}

fn infos(joint: &JointDistribution, spec: &NetworkSpec) -> Result<Vec<ReceiverInfo>> {
    Ok((0..spec.receivers()).map(|l| ReceiverInfo::new(joint, l)).collect::<rrk::Result<_>>()?)
}

pub fn info(args: &InfoArgs) -> Result<bool> {
    let (spec, ens) = load_network(&args.input)?;
    let k = spec.senders();
    if k > MAX_UNION_SENDERS {
        bail!(Error::CapExceeded(format!("K = {k} exceeds the table limit of {MAX_UNION_SENDERS} senders")));
    }
    let joint = build_joint(&spec, &ens)?;
    let mut subsets: Vec<SenderSet> = SenderSet::full(k).nonempty_subsets().collect();
    subsets.sort_by_key(|s| (s.len(), s.lex_key()));

    println!("{:<9} {:<16} {:<16} {:>12}", "receiver", "S", "T", "bits");
    let mut out = Vec::new();
    for (l, info) in infos(&joint, &spec)?.iter().enumerate() {
        let mut entries = Vec::new();
        for &s in &subsets {
            for &t in subsets.iter().filter(|t| t.is_subset(s)) {
                let bits = info.mi(t, s.difference(t));
                println!("{:<9} {:<16} {:<16} {:>12.9}", format!("Y{}", l + 1), s.to_string(), t.to_string(), bits);
                entries.push(json!({ "S": s, "T": t, "bits": bits }));
            }
        }
        out.push(json!({ "receiver": l + 1, "demand": spec.demand(l), "entries": entries }));
    }
    if let Some(path) = &args.input.out {
        emit(Some(path), &json!({ "K": k, "L": spec.receivers(), "receivers": out }))?;
    }
    Ok(true)
}

pub fn region(args: &RegionArgs) -> Result<bool> {
    check_tol(args.tol)?;
    let (spec, ens) = load_network(&args.input)?;
    let joint = build_joint(&spec, &ens)?;
    let infos = infos(&joint, &spec)?;
    if args.form == Form::Optimal && args.receiver.is_some() {
        bail!(Error::Usage("--receiver does not apply to --form optimal".into()));
    }
    let selected = receivers(&spec, args.receiver)?;
    if let Some(r) = &args.rates {
        if r.len() != spec.senders() {
            bail!(Error::Usage(format!("{} rates given for {} senders", r.len(), spec.senders())));
        }
    }

    let mut report = json!({ "form": format!("{:?}", args.form).to_lowercase(), "K": spec.senders(), "L": spec.receivers() });
    // Region used for membership and boundary extraction.
    let region_for = |l: usize| infos[l].receiver_region(spec.demand(l));
    match args.form {
        Form::Optimal => {
            let region = optimal_region(&joint, &spec)?;
            report["region"] = region_to_json(&region);
            if let Some(r) = &args.rates {
                report["verdict"] = json!(member(&region, r, args.tol)?);
            }
        }
        Form::Mac | Form::Min => {
            let mut parts = Vec::new();
            for &l in &selected {
                let demand = spec.demand(l);
                let mut part = json!({ "receiver": l + 1, "demand": demand });
                if args.form == Form::Mac {
                    part["region"] = region_to_json(&region_for(l)?);
                } else {
                    let mf = MinForm::new(&infos[l], demand)?;
                    part["constraints"] = serde_json::to_value(mf.constraints())?;
                }
                if let Some(r) = &args.rates {
                    let v = match args.form {
                        Form::Mac => member(&region_for(l)?, r, args.tol)?,
                        _ => MinForm::new(&infos[l], demand)?.verdict(r, args.tol)?,
                    };
                    part["verdict"] = json!(v);
                }
                parts.push(part);
            }
            report["receivers"] = Value::Array(parts);
        }
    }
    if let Some(r) = &args.rates {
        let sets = selected
            .iter()
            .map(|&l| Ok(json!({ "receiver": l + 1, "report": decodable_set_report(&infos[l], r, args.tol)? })))
            .collect::<Result<Vec<_>>>()?;
        report["decodable_sets"] = Value::Array(sets);
    }

    if !args.boundary.is_empty() {
        if spec.senders() != 2 {
            bail!(Error::Usage("--boundary needs a network with two senders".into()));
        }
        let region = match (args.form, selected.as_slice()) {
            (Form::Optimal, _) => optimal_region(&joint, &spec)?,
            (_, [l]) => region_for(*l)?,
            // The min form describes the same set, so the MAC form supplies its envelope.
            (_, ls) => RegionExpr::Intersection(ls.iter().map(|&l| region_for(l)).collect::<rrk::Result<_>>()?),
        };
        let (one, two) = (SenderSet::singleton(0), SenderSet::singleton(1));
        let extent = |a: SenderSet, b: SenderSet| 1.1 * infos.iter().map(|i| i.mi(a, b)).fold(1e-3, f64::max);
        let points = boundary_2d(&region, args.grid, extent(one, two), extent(two, one), args.tol)?;
        for path in &args.boundary {
            let text = match path.extension().and_then(|e| e.to_str()) {
                Some("csv") => boundary_csv(&points),
                Some("svg") => boundary_svg(&points),
                _ => bail!(Error::Usage(format!("boundary file {} must end in .csv or .svg", path.display()))),
            };
            write_atomic(path, &text)?;
        }
        report["boundary_points"] = json!(points.len());
    }
    emit(args.input.out.as_deref(), &report)?;
    Ok(true)
}

pub fn equiv(args: &EquivArgs) -> Result<bool> {
    check_tol(args.tol)?;
    let (spec, ens) = load_network(&args.input)?;
    let k = spec.senders();
    if k > args.max_senders {
        bail!(Error::CapExceeded(format!("K = {k} exceeds --max-senders {}", args.max_senders)));
    }
    let joint = build_joint(&spec, &ens)?;
    let infos = infos(&joint, &spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    // Sample box: 1.2 times the largest single-sender bound, per sender.
    let upper: Vec<f64> = (0..k)
        .map(|s| {
            let one = SenderSet::singleton(s);
            1.2 * infos.iter().map(|i| i.mi(one, one.complement(k))).fold(0.0, f64::max) + 0.05
        })
        .collect();
    let points: Vec<Vec<f64>> =
        (0..args.samples).map(|_| upper.iter().map(|&u| rng.gen_range(0.0..u)).collect()).collect();

    let mut ok = true;
    let mut per_receiver = Vec::new();
    for l in receivers(&spec, args.receiver)? {
        let info = &infos[l];
        let demand = spec.demand(l);
        let min_form = MinForm::new(info, demand)?;
        let mac = info.receiver_region(demand)?;
        let (mut skipped, mut mismatches, mut closure_failures, mut cert_checked, mut cert_failures) = (0, 0, 0, 0, 0);
        let mut examples = Vec::new();
        for p in &points {
            let (a, b) = (min_form.verdict(p, args.tol)?, member(&mac, p, args.tol)?);
            if a == Verdict::Boundary || b == Verdict::Boundary {
                skipped += 1;
            } else if a != b {
                mismatches += 1;
                if examples.len() < 5 {
                    examples.push(json!({ "rates": p, "min": a, "mac": b }));
                }
            }
            match check_union_closure(info, p, args.tol) {
                Ok(_) => {
                    let s_star = maximal_set(info, p, args.tol)?.s_star;
                    let cert = prop2_certificate(info, p, s_star, args.tol)?;
                    if cert.checked {
                        cert_checked += 1;
                        cert_failures += usize::from(!cert.holds);
                    }
                }
                Err(Error::Consistency(_)) => closure_failures += 1,
                Err(e) => return Err(e.into()),
            }
        }
        ok &= mismatches == 0 && closure_failures == 0 && cert_failures == 0;
        per_receiver.push(json!({
            "receiver": l + 1,
            "demand": demand,
            "samples": points.len(),
            "boundary_skipped": skipped,
            "mismatches": mismatches,
            "mismatch_examples": examples,
            "union_closure_failures": closure_failures,
            "certificate_checked": cert_checked,
            "certificate_failures": cert_failures,
        }));
    }
    let report = json!({
        "status": if ok { "ok" } else { "fail" },
        "seed": args.seed,
        "tol": args.tol,
        "receivers": per_receiver,
    });
    emit(args.input.out.as_deref(), &report)?;
    Ok(ok)
}

fn polygon(sys: &rrk::polytope::InequalitySystem) -> Result<Value> {
    Ok(json!(sys.vertices_2d()?))
}

pub fn hk(args: &HkArgs) -> Result<bool> {
    check_tol(args.tol)?;
    if args.grid == 0 {
        bail!(Error::Usage("--grid must be positive".into()));
    }
    let e = load_hk(&args.spec)?;
    let hk1 = hk_receiver_system(&e, 0)?;
    let hk2 = hk_receiver_system(&e, 1)?;
    let proj = hk_region_2d(&e)?;
    let cm = chong_motani_region(&e)?;
    let ropt = r_opt_2d(&e)?;
    let common = (SenderSet::from_indices([U11, U12, U21]), SenderSet::from_indices([U21, U22, U12]));

    let pts = grid_points(args.grid, default_extent(&e)?);
    let hk_region = RegionExpr::Leaf(proj.polytope.clone());
    let cm_region = RegionExpr::Leaf(cm.clone());
    let case = ropt
        .cases
        .iter()
        .find(|c| (c.s1, c.s2) == common)
        .ok_or_else(|| Error::Consistency("common-decoding case missing".into()))?;
    let case_region = RegionExpr::Leaf(case.polytope.clone());
    let diffs = json!({
        "projection_vs_compact": grid_compare(&hk_region, &cm_region, &pts, args.tol, false),
        "projection_in_compact": grid_compare(&hk_region, &cm_region, &pts, args.tol, true),
        "projection_vs_union": grid_compare(&hk_region, &ropt.region, &pts, args.tol, false),
        "projection_in_union": grid_compare(&hk_region, &ropt.region, &pts, args.tol, true),
        "projection_vs_common_case": grid_compare(&hk_region, &case_region, &pts, args.tol, false),
    });
    let count = |key: &str| diffs[key]["disagreements"].as_u64().unwrap_or(u64::MAX);
    let mut ok = count("projection_in_compact") == 0
        && count("projection_in_union") == 0
        && count("projection_vs_common_case") == 0;
    if args.require_equal {
        ok &= count("projection_vs_compact") == 0 && count("projection_vs_union") == 0;
    }

    let cases = ropt
        .cases
        .iter()
        .map(|c| {
            Ok(json!({
                "s1": split_label(c.s1),
                "s2": split_label(c.s2),
                "system": c.system,
                "polygon": polygon(&c.system)?,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    let report = json!({
        "status": if ok { "ok" } else { "fail" },
        "split_systems": { "receiver1": hk1, "receiver2": hk2 },
        "projection": { "system": proj.system, "polygon": polygon(&proj.system)? },
        "compact_form": { "region": region_to_json(&cm_region), "polygon": polygon(&cm.to_system())? },
        "cases": cases,
        "grid": { "size": args.grid, "band": args.tol, "diffs": diffs },
    });
    emit(args.out.as_deref(), &report)?;
    Ok(ok)
}

fn decoders(names: &[String], eps: Option<f64>) -> Result<Vec<DecoderKind>> {
    let mut out = Vec::new();
    for name in names {
        if name.eq_ignore_ascii_case("all") {
            let eps = eps.ok_or_else(|| Error::Usage("--decoder all needs --eps".into()))?;
            for k in DecoderKind::all(eps) {
                out.push(DecoderKind::parse(k.name(), k.eps())?);
            }
        } else {
            out.push(DecoderKind::parse(name, eps)?);
        }
    }
    Ok(out)
}

/// Ensemble-average exact error over `codebooks` seeded draws.
fn exact_average(sim: &Simulator, rates: &[f64], n: usize, kind: DecoderKind, codebooks: usize, seed: u64) -> rrk::Result<Value> {
    let mut per_codebook: Vec<ErrorReport> = Vec::with_capacity(codebooks);
    for i in 0..codebooks {
        let cb = sim.generate_codebook(rates, n, seed.wrapping_add(i as u64))?;
        per_codebook.push(exact_error(sim, &cb, kind)?);
    }
    let receivers = sim.spec().receivers();
    let c = codebooks as f64;
    let mean: Vec<f64> = (0..receivers).map(|l| per_codebook.iter().map(|r| r.error[l]).sum::<f64>() / c).collect();
    let stderr: Vec<f64> = (0..receivers)
        .map(|l| {
            if codebooks < 2 {
                return 0.0;
            }
            let var = per_codebook.iter().map(|r| (r.error[l] - mean[l]).powi(2)).sum::<f64>() / (c - 1.0);
            (var / c).sqrt()
        })
        .collect();
    Ok(json!({
        "decoder": kind,
        "n": n,
        "method": "exact-enumeration",
        "codebooks": codebooks,
        "seed": seed,
        "error": mean,
        "stderr": stderr,
        "per_codebook": per_codebook.iter().map(|r| &r.error).collect::<Vec<_>>(),
    }))
}

pub fn simulate(args: &SimulateArgs) -> Result<bool> {
    let (spec, ens) = load_network(&args.input)?;
    if args.rates.len() != spec.senders() {
        bail!(Error::Usage(format!("{} rates given for {} senders", args.rates.len(), spec.senders())));
    }
    if args.n.is_empty() || args.n.contains(&0) {
        bail!(Error::Usage("--n needs positive blocklengths".into()));
    }
    if args.codebooks == 0 {
        bail!(Error::Usage("--codebooks must be at least 1".into()));
    }
    let kinds = decoders(&args.decoder, args.eps)?;
    let sim = Simulator::new(spec, ens)?;
    let mut results = Vec::new();
    for &n in &args.n {
        for &kind in &kinds {
            let exact = match args.method {
                MethodArg::MonteCarlo => None,
                MethodArg::Exact => Some(exact_average(&sim, &args.rates, n, kind, args.codebooks, args.seed)?),
                MethodArg::Auto => match exact_average(&sim, &args.rates, n, kind, args.codebooks, args.seed) {
                    Ok(v) => Some(v),
                    Err(Error::CapExceeded(_)) => None,
                    Err(e) => return Err(e.into()),
                },
            };
            let entry = match exact {
                Some(v) => v,
                None => {
                    let source = CodeSource::Ensemble { rates: args.rates.clone(), n };
                    serde_json::to_value(monte_carlo_error(&sim, &source, kind, args.trials, args.seed)?)?
                }
            };
            results.push(entry);
        }
    }
    emit(args.input.out.as_deref(), &json!({ "rates": args.rates, "results": results }))?;
    Ok(true)
}
