use std::sync::OnceLock;

use aramid::channel::{other_symbol, random_vector, trial_rng, Pattern};
use aramid::ltenc::{lt_decode, lt_encode, LtCode, LtConfig, LtReceived, MediatorChoice, MediatorCode};

fn desk() -> &'static LtCode {
    static CODE: OnceLock<LtCode> = OnceLock::new();
    CODE.get_or_init(|| {
        let cfg: LtConfig =
            serde_json::from_str(r#"{"n":64,"rate":[1,2],"epsilon":0.35,"kappa":[1,2],"mu":0.0625,"seed":5}"#).unwrap();
        LtCode::build(&cfg, false).unwrap()
    })
}

fn budget(code: &LtCode) -> usize {
    ((1.0 - 0.5 - code.design.epsilon) * code.n() as f64 + 1e-9).floor() as usize
}

/// Wrong mediator symbols after the first stage stay under `τn`, the bound
/// behind the choice of mediator.
#[test]
fn first_stage_error_fraction_stays_below_tau() {
    let code = desk();
    assert!(matches!(code.mediator(), MediatorCode::SelfHosted { .. }));
    let c = &code.constants;
    assert!(c.hypotheses_hold && c.tau_bound < c.mu);
    let f = code.field();
    let n = code.n();
    let b = budget(code);
    for trial in 0..60 {
        let mut rng = trial_rng(41, trial);
        let t = (trial as usize) % (b / 2 + 1);
        let rho = b - 2 * t;
        let eta: Vec<Vec<u32>> = (0..n).map(|_| random_vector(&f, code.block_len(), &mut rng)).collect();
        let cw = lt_encode(code, &eta).unwrap();
        let pattern = Pattern::sample(n, t, rho, &mut rng);
        let mut y: Vec<LtReceived> = cw.x.iter().map(|x| LtReceived::from_symbol(code, Some(x))).collect();
        for &u in &pattern.erasures {
            y[u] = LtReceived::from_symbol(code, None);
        }
        for &u in &pattern.errors {
            y[u] = LtReceived::from_symbol(code, Some(&other_symbol(&f, &cw.x[u], &mut rng)));
        }
        let rep = lt_decode(code, &y).unwrap();
        let wrong = rep.w_tilde.iter().zip(&cw.w).filter(|(a, b)| a != b).count();
        assert!(wrong as f64 <= c.tau_bound * n as f64, "trial {trial}: {wrong}");
        assert_eq!(rep.s_hat.as_ref(), Some(&cw.s));
        assert_eq!(rep.eta, Some(eta));
    }
}

#[test]
fn half_erased_symbols_are_recovered() {
    let code = desk();
    let f = code.field();
    let mut rng = trial_rng(2, 0);
    let eta: Vec<Vec<u32>> = (0..code.n())
        .map(|_| random_vector(&f, code.block_len(), &mut rng))
        .collect();
    let cw = lt_encode(code, &eta).unwrap();
    let mut y: Vec<LtReceived> = cw.x.iter().map(|x| LtReceived::from_symbol(code, Some(x))).collect();
    // losing only one half of a symbol is no worse than losing all of it
    for u in 0..4 {
        y[u].first = None;
        y[10 + u].second = None;
    }
    assert_eq!(lt_decode(code, &y).unwrap().eta, Some(eta));
}

#[test]
fn auto_choice_falls_back_to_grs_when_tau_is_too_large() {
    let cfg: LtConfig =
        serde_json::from_str(r#"{"n":64,"rate":[1,2],"epsilon":0.3,"kappa":[1,2],"mu":0.25,"seed":5}"#).unwrap();
    assert_eq!(cfg.mediator, MediatorChoice::Auto);
    let code = LtCode::build(&cfg, false).unwrap();
    assert!(matches!(code.mediator(), MediatorCode::InterleavedGrs { .. }));
    assert!(code.constants.tau_bound < code.constants.mu);
}
