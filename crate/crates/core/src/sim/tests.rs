use super::*;
use crate::prob::InputEnsemble;

/// Two senders, one receiver seeing `x1 xor x2` through a BSC.
fn xor_mac(flip: f64, demand: SenderSet) -> NetworkSpec {
    let mut ch = Vec::new();
    for x1 in 0..2 {
        for x2 in 0..2 {
            let y = x1 ^ x2;
            ch.extend(if y == 0 { [1.0 - flip, flip] } else { [flip, 1.0 - flip] });
        }
    }
    NetworkSpec::new(&[2, 2], &[2], ch, vec![demand]).unwrap()
}

/// Each receiver sees its own sender perfectly.
fn orthogonal() -> NetworkSpec {
    let mut ch = Vec::new();
    for x1 in 0..2 {
        for x2 in 0..2 {
            let mut row = [0.0; 4];
            row[x1 * 2 + x2] = 1.0;
            ch.extend(row);
        }
    }
    NetworkSpec::new(&[2, 2], &[2, 2], ch, vec![SenderSet::singleton(0), SenderSet::singleton(1)]).unwrap()
}

#[test]
fn single_message_is_always_right() {
    let sim = Simulator::new(xor_mac(0.2, SenderSet::singleton(0)), InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
    let cb = sim.generate_codebook(&[0.0, 0.5], 4, 3).unwrap();
    let r = exact_error(&sim, &cb, DecoderKind::Mld).unwrap();
    assert_eq!(r.error, vec![0.0]);
}

#[test]
fn clean_orthogonal_channels_decode_perfectly() {
    let ens = InputEnsemble::uniform(&[2, 2]).unwrap();
    let sim = Simulator::new(orthogonal(), ens.clone()).unwrap();
    let words = vec![vec![0, 0, 1], vec![1, 1, 0]];
    let cb = Codebook::new(&ens, vec![0; 3], vec![words.clone(), words]).unwrap();
    for kind in [DecoderKind::Mld, DecoderKind::SimultaneousMl] {
        let r = exact_error(&sim, &cb, kind).unwrap();
        assert!(r.error.iter().all(|&e| e.abs() < 1e-15), "{kind}: {:?}", r.error);
    }
}

#[test]
fn useless_channel_errs_half_the_time() {
    // Output independent of both inputs; two messages for sender 1.
    let spec = NetworkSpec::new(&[2, 2], &[2], vec![0.5; 8], vec![SenderSet::singleton(0)]).unwrap();
    let ens = InputEnsemble::uniform(&[2, 2]).unwrap();
    let sim = Simulator::new(spec, ens.clone()).unwrap();
    let cb = Codebook::new(&ens, vec![0; 2], vec![vec![vec![0, 0], vec![1, 1]], vec![vec![0, 1]]]).unwrap();
    for kind in DecoderKind::all(0.5) {
        let r = exact_error(&sim, &cb, kind).unwrap();
        assert!(r.error[0] >= 0.5 - 1e-12, "{kind}: {}", r.error[0]);
    }
    assert!((exact_error(&sim, &cb, DecoderKind::Mld).unwrap().error[0] - 0.5).abs() < 1e-12);
}

#[test]
fn hand_computed_mld_error() {
    // BSC(0.1) from sender 1 only, codewords 00 and 11: MLD errs on exactly
    // the outputs at distance >= 1 resolved the wrong way.
    let mut ch = Vec::new();
    for x1 in 0..2 {
        ch.extend(if x1 == 0 { [0.9, 0.1] } else { [0.1, 0.9] });
    }
    let spec = NetworkSpec::new(&[2], &[2], ch, vec![SenderSet::singleton(0)]).unwrap();
    let ens = InputEnsemble::uniform(&[2]).unwrap();
    let sim = Simulator::new(spec, ens.clone()).unwrap();
    let cb = Codebook::new(&ens, vec![0; 2], vec![vec![vec![0, 0], vec![1, 1]]]).unwrap();
    // y = 01, 10 tie and go to message 0; message 1 loses them. y = 00 goes to 0, y = 11 to 1.
    let want = 0.5 * (2.0 * 0.9 * 0.1 + 0.1 * 0.1) + 0.5 * 0.1 * 0.1;
    let got = exact_error(&sim, &cb, DecoderKind::Mld).unwrap().error[0];
    assert!((got - want).abs() < 1e-15, "{got} vs {want}");
}

#[test]
fn mld_dominates_on_small_instances() {
    let spec = xor_mac(0.1, SenderSet::singleton(0));
    let sim = Simulator::new(spec, InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
    for seed in 0..10 {
        let cb = sim.generate_codebook(&[0.5, 0.5], 4, seed).unwrap();
        let errs: Vec<f64> = DecoderKind::all(0.3).iter().map(|&k| exact_error(&sim, &cb, k).unwrap().error[0]).collect();
        for e in &errs[1..] {
            assert!(errs[0] <= e + 1e-12, "{errs:?}");
        }
        assert!(errs[3] <= errs[4] + 1e-12, "snd {} > sd {}", errs[3], errs[4]);
    }
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let spec = xor_mac(0.1, SenderSet::singleton(0));
    let sim = Simulator::new(spec, InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
    let cb = sim.generate_codebook(&[0.5, 0.25], 4, 11).unwrap();
    for kind in [DecoderKind::Mld, DecoderKind::Snd(0.4)] {
        let exact = exact_error(&sim, &cb, kind).unwrap().error[0];
        let mc = monte_carlo_error(&sim, &CodeSource::Fixed(cb.clone()), kind, 20_000, 5).unwrap();
        let se = mc.stderr.as_ref().unwrap()[0].max(1e-3);
        assert!((mc.error[0] - exact).abs() < 4.0 * se, "{kind}: mc {} exact {exact}", mc.error[0]);
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let sim = Simulator::new(xor_mac(0.1, SenderSet::full(2)), InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
    let src = CodeSource::Ensemble { rates: vec![0.25, 0.25], n: 4 };
    let a = monte_carlo_error(&sim, &src, DecoderKind::Sd(0.5), 500, 9).unwrap();
    let b = monte_carlo_error(&sim, &src, DecoderKind::Sd(0.5), 500, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn deterministic_success_has_zero_variance() {
    let ens = InputEnsemble::uniform(&[2, 2]).unwrap();
    let sim = Simulator::new(orthogonal(), ens.clone()).unwrap();
    let words = vec![vec![0, 1], vec![1, 0]];
    let cb = Codebook::new(&ens, vec![0; 2], vec![words.clone(), words]).unwrap();
    let r = monte_carlo_error(&sim, &CodeSource::Fixed(cb), DecoderKind::Mld, 200, 1).unwrap();
    assert_eq!(r.error, vec![0.0, 0.0]);
    assert_eq!(r.stderr, Some(vec![0.0, 0.0]));
}

#[test]
fn decode_returns_demanded_messages() {
    let ens = InputEnsemble::uniform(&[2, 2]).unwrap();
    let sim = Simulator::new(orthogonal(), ens.clone()).unwrap();
    let cb = Codebook::new(&ens, vec![0; 2], vec![vec![vec![0, 1], vec![1, 0]], vec![vec![1, 1]]]).unwrap();
    assert_eq!(sim.decode(&cb, 0, &[1, 0], DecoderKind::Mld).unwrap(), Some(vec![1]));
    assert_eq!(sim.decode(&cb, 1, &[1, 1], DecoderKind::Mld).unwrap(), Some(vec![0]));
}

#[test]
fn decoder_names_round_trip() {
    for k in DecoderKind::all(0.25) {
        assert_eq!(DecoderKind::parse(k.name(), k.eps()).unwrap(), k);
    }
    assert!(DecoderKind::parse("snd", None).is_err());
    assert!(DecoderKind::parse("snd", Some(1.5)).is_err());
    let json = serde_json::to_string(&DecoderKind::Snd(0.25)).unwrap();
    assert_eq!(json, r#"{"kind":"snd","eps":0.25}"#);
}

#[test]
fn conditioning_on_everything_gives_single_letter_entropy() {
    let sim = Simulator::new(xor_mac(0.1, SenderSet::singleton(0)), InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
    let h = crate::prob::entropy_bits(&[0.1, 0.9]);
    let e = conditional_entropy_rate(&sim, &[0.5, 0.5], 4, 0, SenderSet::full(2), 5, 1).unwrap();
    assert!((e.mean - h).abs() < 1e-12 && e.stderr < 1e-12);
    let e = conditional_entropy_rate(&sim, &[0.5, 0.0], 4, 0, SenderSet::singleton(0), 5, 1).unwrap();
    assert!((e.mean - h).abs() < 1e-12);
}

#[test]
fn single_codeword_list_is_at_most_one() {
    let sim = Simulator::new(xor_mac(0.1, SenderSet::singleton(0)), InputEnsemble::uniform(&[2, 2]).unwrap()).unwrap();
    let r = expected_list_size(&sim, &[0.0, 0.0], 4, 0.5, 0, 1, 200, 3).unwrap();
    assert_eq!(r.count, 1);
    assert!(r.mean <= 1.0);
    assert!((r.predicted_mean.unwrap() - r.p_true_typical.unwrap()).abs() < 1e-15);
}

#[test]
fn pair_probability_matches_sequence_enumeration() {
    let sim = Simulator::new(xor_mac(0.2, SenderSet::singleton(0)), InputEnsemble::iid(&[vec![0.3, 0.7], vec![0.6, 0.4]]).unwrap()).unwrap();
    let n = 4;
    let eps = 1.5;
    let vars = [Var::Q, Var::X(0), Var::X(1), Var::Y(0)];
    let joint = sim.joint();
    let p = |x1: usize, x2: usize, y: usize| joint.get(&[0, x1, x2, y]);
    let px2 = [0.6, 0.4];
    let mut want = 0.0;
    // Enumerate (x1, y, true x2) per position and an independent x2'.
    for code in 0..(16usize.pow(n as u32)) {
        let mut c = code;
        let (mut x1, mut x2, mut x2w, mut y) = (vec![0; n], vec![0; n], vec![0; n], vec![0; n]);
        let mut prob = 1.0;
        for i in 0..n {
            let s = c % 16;
            c /= 16;
            x1[i] = s & 1;
            x2[i] = (s >> 1) & 1;
            y[i] = (s >> 2) & 1;
            x2w[i] = (s >> 3) & 1;
            prob *= p(x1[i], x2[i], y[i]) * px2[x2w[i]];
        }
        if is_typical(joint, &vars, &[&[0; 4], &x1, &x2w, &y], eps).unwrap() {
            want += prob;
        }
    }
    let got = pair_typical_probability(&sim, 0, 1, n, eps).unwrap();
    assert!(want > 0.01);
    assert!((got - want).abs() < 1e-14, "{got} vs {want}");
}
