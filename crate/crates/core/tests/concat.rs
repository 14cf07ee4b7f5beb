use std::sync::OnceLock;

use aramid::channel::{corrupt_rows, random_vector, trial_rng};
use aramid::gmd::{concat_encode, gmd_decode, ConcatCode};
use aramid::grs::GrsCode;
use aramid::instance::{TannerConfig, TannerInstance};
use aramid::iterdec::decode_phi;

fn code() -> &'static ConcatCode {
    static CODE: OnceLock<ConcatCode> = OnceLock::new();
    CODE.get_or_init(|| {
        let inst = TannerInstance::build(&TannerConfig::new(40, 36, 37, 19, 19, 3), false).unwrap();
        let inner = GrsCode::standard(inst.code.field(), 30, 19).unwrap();
        ConcatCode::new(inst.code, inst.derived.params.unwrap(), inner).unwrap()
    })
}

#[test]
fn clean_rows_reduce_to_one_outer_decode() {
    let code = code();
    let f = code.inner_field();
    for trial in 0..10 {
        let mut rng = trial_rng(1, trial);
        let msg = random_vector(&f, code.outer.dimension(), &mut rng);
        let x = concat_encode(code, &msg).unwrap();
        let res = gmd_decode(code, &x).unwrap();
        assert_eq!(res.outer_calls(), 1);
        assert!(res.trace.reliabilities.iter().all(|&w| w == 0));
        let phi = code.outer.psi(&code.outer.encode_generic(&msg).unwrap()).unwrap();
        let direct = decode_phi(&code.outer, &phi, &code.outer_params, None);
        assert_eq!(res.phi, direct.result);
        assert_eq!(res.message, Some(msg));
        assert_eq!(res.distance, Some(0));
    }
}

#[test]
fn radius_matches_the_classical_product() {
    let code = code();
    let d_out = (2.0 * code.outer_params.radius(code.outer.n())).floor() as usize + 1;
    assert_eq!(code.outer_design_distance(), d_out);
    assert_eq!(code.product_radius(), (12 * d_out) as f64 / 2.0);
    assert_eq!(code.ladder_len(), 6);
}

#[test]
fn ladder_trace_is_monotone_and_bounded() {
    let code = code();
    let f = code.inner_field();
    let d = code.inner.min_distance();
    let top = code.product_radius().ceil() as usize - 1;
    for (k, errors) in [top, 3 * top, 8 * top].into_iter().enumerate() {
        for trial in 0..10 {
            let mut rng = trial_rng(10 + k as u64, trial);
            let msg = random_vector(&f, code.outer.dimension(), &mut rng);
            let mut y = concat_encode(code, &msg).unwrap();
            corrupt_rows(&f, &mut y, errors, &mut rng);
            let res = gmd_decode(code, &y).unwrap();
            let a = &res.trace.attempts;
            assert!(a.len() <= (d + 1).div_ceil(2));
            assert!(a.windows(2).all(|w| w[0].erasures <= w[1].erasures));
            assert!(a.iter().rev().skip(1).all(|x| !x.validated));
            assert!(res.trace.reliabilities.iter().all(|&w| w <= d));
            match res.distance {
                Some(dist) => {
                    assert!((dist as f64) < code.product_radius());
                    assert!(a.last().unwrap().validated);
                }
                None => assert_eq!(a.len(), code.ladder_len()),
            }
            if errors == top {
                assert_eq!(res.message, Some(msg));
            }
        }
    }
}
