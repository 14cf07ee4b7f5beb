use std::sync::OnceLock;

use aramid::bigraph::BipartiteRegularGraph;
use aramid::channel::{corrupt_phi, random_vector, trial_rng, Pattern};
use aramid::gf::PrimeField;
use aramid::grs::GrsCode;
use aramid::harness::random_coset_word;
use aramid::instance::{TannerConfig, TannerInstance};
use aramid::iterdec::{decode_phi, decode_phi_with, DecodeOptions, DecodeParams, Side};
use aramid::ltenc::tau_bound;
use aramid::tanner::{PhiWord, TannerCode};
use proptest::prelude::*;

fn dense() -> &'static TannerInstance {
    static INST: OnceLock<TannerInstance> = OnceLock::new();
    INST.get_or_init(|| TannerInstance::build(&TannerConfig::new(40, 36, 37, 19, 19, 3), false).unwrap())
}

/// Largest `(t, ρ)` pairs with `t + ρ/2 ≤ σn`.
fn boundary(inst: &TannerInstance) -> Vec<(usize, usize)> {
    let r = inst.derived.params.unwrap().radius(inst.code.n());
    (0..=r.floor() as usize)
        .map(|t| (t, (2.0 * (r - t as f64)).floor() as usize))
        .collect()
}

fn transmit(code: &TannerCode, t: usize, rho: usize, seed: u64, trial: u64) -> (Vec<u32>, PhiWord, PhiWord) {
    let mut rng = trial_rng(seed, trial);
    let msg = random_vector(&code.field(), code.dimension(), &mut rng);
    let c = code.encode_generic(&msg).unwrap();
    let phi = code.psi(&c).unwrap();
    let pattern = Pattern::sample(code.n(), t, rho, &mut rng);
    let y = corrupt_phi(&code.field(), &phi, &pattern, &mut rng);
    (c, phi, y)
}

#[test]
fn decodes_on_the_radius_boundary() {
    let inst = dense();
    let params = inst.derived.params.unwrap();
    for (k, (t, rho)) in boundary(inst).into_iter().enumerate() {
        for trial in 0..40 {
            let (_, phi, y) = transmit(&inst.code, t, rho, k as u64, trial);
            let rep = decode_phi(&inst.code, &y, &params, None);
            assert_eq!(rep.result.as_ref(), Some(&phi), "t = {t}, ρ = {rho}, trial {trial}");
            assert!(rep.rounds_run <= params.nu);
            assert!(rep.component_calls as f64 <= params.call_budget(inst.code.n()));
        }
    }
}

#[test]
fn dirty_and_full_schedules_agree() {
    let inst = dense();
    let params = inst.derived.params.unwrap();
    let full = DecodeOptions {
        dirty: false,
        ..DecodeOptions::default()
    };
    let serial = DecodeOptions {
        parallel: false,
        ..DecodeOptions::default()
    };
    for trial in 0..30 {
        // beyond the radius as well, where the schedules have work to do
        let t = 4 + (trial as usize % 12);
        let (_, _, y) = transmit(&inst.code, t, 3, 77, trial);
        let a = decode_phi(&inst.code, &y, &params, None);
        let b = decode_phi_with(&inst.code, &y, &params, None, &full);
        let c = decode_phi_with(&inst.code, &y, &params, None, &serial);
        assert_eq!(a.result, b.result, "trial {trial}");
        assert_eq!(a, c);
        assert!(a.component_calls <= b.component_calls);
    }
}

#[test]
fn wrong_blocks_vanish_inside_the_radius() {
    let inst = dense();
    let params = inst.derived.params.unwrap();
    let n = inst.code.n();
    let r = params.radius(n);
    for trial in 0..20 {
        let (c, phi, y) = transmit(&inst.code, r.floor() as usize, 0, 5, trial);
        let opts = DecodeOptions {
            truth: Some(&c),
            ..DecodeOptions::default()
        };
        let rep = decode_phi_with(&inst.code, &y, &params, None, &opts);
        assert_eq!(rep.result, Some(phi));
        let first = &rep.trace[0];
        assert_eq!(first.side, Side::Right);
        let tau = tau_bound(params.sigma, inst.derived.gamma, inst.derived.delta);
        assert!(first.wrong_blocks.unwrap() as f64 <= tau * n as f64, "{:?}", rep.trace);
        assert_eq!(rep.trace.last().unwrap().wrong_blocks, Some(0));
    }
}

#[test]
fn coset_words_decode() {
    let inst = dense();
    let params = inst.derived.params.unwrap();
    let code = &inst.code;
    let g = code.graph();
    for (k, (t, rho)) in boundary(inst).into_iter().enumerate() {
        for trial in 0..20 {
            let mut rng = trial_rng(900 + k as u64, trial);
            let (z, cosets) = random_coset_word(code, &mut rng);
            assert!(code.membership_coset(&z, &cosets));
            let phi = PhiWord::from_symbols((0..code.n()).map(|u| z[g.left_edges(u)].to_vec()).collect());
            let pattern = Pattern::sample(code.n(), t, rho, &mut rng);
            let y = corrupt_phi(&code.field(), &phi, &pattern, &mut rng);
            let rep = decode_phi(code, &y, &params, Some(&cosets));
            assert_eq!(rep.result, Some(phi));
            assert!(code.membership_coset(rep.codeword.as_ref().unwrap(), &cosets));
        }
    }
}

/// `(K₄,₄, [4,2,3] : [4,2,3])` over GF(5): every codeword and every
/// pattern with `2t + ρ < 3` against nearest-codeword decoding.
#[test]
fn agrees_with_maximum_likelihood_on_k44() {
    let f = PrimeField::new(5).unwrap();
    let c = GrsCode::standard(f, 4, 2).unwrap();
    let code = TannerCode::new(BipartiteRegularGraph::complete(4).unwrap(), c.clone(), c).unwrap();
    let params = DecodeParams::unguaranteed(4);
    let dim = code.dimension();
    let words: Vec<PhiWord> = (0..5usize.pow(dim as u32))
        .map(|mut m| {
            let msg: Vec<u32> = (0..dim)
                .map(|_| {
                    let d = (m % 5) as u32;
                    m /= 5;
                    d
                })
                .collect();
            code.psi(&code.encode_generic(&msg).unwrap()).unwrap()
        })
        .collect();
    let d_min = code.brute_min_phi_weight().unwrap();
    assert!(d_min >= 3);
    let mut rng = trial_rng(1, 0);
    let mut cases = 0;
    for x in &words {
        for u in 0..4 {
            for (t, rho) in [(1, 0), (0, 1), (0, 2)] {
                let mut y = x.clone();
                if t == 1 {
                    y.entries[u] = Some(aramid::channel::other_symbol(
                        &f,
                        x.entries[u].as_ref().unwrap(),
                        &mut rng,
                    ));
                } else {
                    y.entries[u] = None;
                    if rho == 2 {
                        y.entries[(u + 1) % 4] = None;
                    }
                }
                let ml = words
                    .iter()
                    .min_by_key(|w| {
                        w.entries
                            .iter()
                            .zip(&y.entries)
                            .filter(|(a, b)| b.is_some() && a != b)
                            .count()
                    })
                    .unwrap();
                assert_eq!(ml, x);
                assert_eq!(decode_phi(&code, &y, &params, None).result.as_ref(), Some(x));
                cases += 1;
            }
        }
    }
    assert_eq!(cases, words.len() * 12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn encoding_is_linear_and_invertible(seed in any::<u64>(), a in 1u32..37, b in 0u32..37) {
        let code = &dense().code;
        let f = code.field();
        let mut rng = trial_rng(seed, 0);
        let m1 = random_vector(&f, code.dimension(), &mut rng);
        let m2 = random_vector(&f, code.dimension(), &mut rng);
        let mix: Vec<u32> = m1.iter().zip(&m2).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
        let c1 = code.encode_generic(&m1).unwrap();
        let c2 = code.encode_generic(&m2).unwrap();
        let c = code.encode_generic(&mix).unwrap();
        let expect: Vec<u32> = c1.iter().zip(&c2).map(|(&x, &y)| f.add(f.mul(a, x), f.mul(b, y))).collect();
        prop_assert_eq!(&c, &expect);
        prop_assert!(code.membership(&c));
        prop_assert_eq!(code.message_of(&c).unwrap(), mix);
        let phi = code.psi(&c).unwrap();
        prop_assert_eq!(code.psi_inverse(&phi).unwrap(), c);
    }

    #[test]
    fn noiseless_words_decode_in_one_sweep(seed in any::<u64>()) {
        let inst = dense();
        let (_, phi, y) = transmit(&inst.code, 0, 0, seed, 0);
        let rep = decode_phi(&inst.code, &y, &inst.derived.params.unwrap(), None);
        prop_assert_eq!(rep.result, Some(phi));
        prop_assert_eq!(rep.rounds_run, 2);
        prop_assert!(rep.converged_early);
    }
}
