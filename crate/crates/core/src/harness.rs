//! Seeded decoding experiments on built instances, and audits of the
//! bounds they are supposed to satisfy.
//!
//! Trial `i` of a run draws everything (message, corruption support, error
//! values) from the stream `(seed, i)`, so rows are identical whether the
//! trials run serially or in parallel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigraph::{exhaustive_sweep, top_eigen_residual, BipartiteRegularGraph, SWEEP_LIMIT};
use crate::channel::{corrupt_phi, corrupt_rows, other_symbol, random_vector, trial_rng, Pattern};
use crate::gmd::{concat_encode, gmd_decode, ConcatCode, GmdError};
use crate::grs::GrsCode;
use crate::instance::{BuildError, Derived, TannerConfig, TannerInstance};
use crate::iterdec::{decode_phi, DecodeParams};
use crate::ltenc::{lt_decode, lt_encode, LtCode, LtConfig, LtError, LtReceived};
use crate::tanner::{min_dist_bound, PhiWord, TannerCode};

/// Largest message space searched by the exhaustive minimum-weight check.
pub const BRUTE_LIMIT: f64 = 1e6;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Lt(#[from] LtError),
    #[error(transparent)]
    Gmd(#[from] GmdError),
    #[error("{0}")]
    Usage(String),
}

/// Concatenation of a graph code with a standard GRS inner code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmdConfig {
    pub outer: TannerConfig,
    /// Defaults to the outer field.
    #[serde(default)]
    pub inner_q: Option<u32>,
    pub inner_length: usize,
    pub inner_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ExperimentConfig {
    Plain(TannerConfig),
    /// Same code as `Plain`; trials transmit words of the coset code.
    Coset(TannerConfig),
    Lt(LtConfig),
    Gmd(GmdConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtInstance {
    pub config: LtConfig,
    pub code: LtCode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmdInstance {
    pub config: GmdConfig,
    pub outer: Derived,
    pub code: ConcatCode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Instance {
    Plain(TannerInstance),
    Coset(TannerInstance),
    Lt(LtInstance),
    Gmd(GmdInstance),
}

impl Instance {
    pub fn build(config: &ExperimentConfig, allow_weak: bool) -> Result<Self, HarnessError> {
        Ok(match config {
            ExperimentConfig::Plain(c) => Instance::Plain(TannerInstance::build(c, allow_weak)?),
            ExperimentConfig::Coset(c) => Instance::Coset(TannerInstance::build(c, allow_weak)?),
            ExperimentConfig::Lt(c) => Instance::Lt(LtInstance {
                config: c.clone(),
                code: LtCode::build(c, allow_weak)?,
            }),
            ExperimentConfig::Gmd(c) => {
                let outer = TannerInstance::build(&c.outer, allow_weak)?;
                let field = match c.inner_q {
                    Some(q) => crate::gf::PrimeField::new(q).map_err(BuildError::from)?,
                    None => outer.code.field(),
                };
                let inner = GrsCode::standard(field, c.inner_length, c.inner_dim).map_err(BuildError::from)?;
                let params = outer
                    .derived
                    .params
                    .unwrap_or_else(|| DecodeParams::unguaranteed(outer.code.n()));
                Instance::Gmd(GmdInstance {
                    config: c.clone(),
                    code: ConcatCode::new(outer.code, params, inner)?,
                    outer: outer.derived,
                })
            }
        })
    }

    pub fn mode(&self) -> &'static str {
        match self {
            Instance::Plain(_) => "plain",
            Instance::Coset(_) => "coset",
            Instance::Lt(_) => "lt",
            Instance::Gmd(_) => "gmd",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Instance::Plain(i) | Instance::Coset(i) => i.code.n(),
            Instance::Lt(i) => i.code.n(),
            Instance::Gmd(i) => i.code.outer.n(),
        }
    }

    /// Whether `t` errors and `rho` erasures lie inside the radius the
    /// instance guarantees, with a description of that radius.
    pub fn contract(&self, t: usize, rho: usize) -> (bool, String) {
        if t == 0 && rho == 0 {
            // codewords are fixed points of every decoder here
            return (true, "noiseless channel".into());
        }
        match self {
            Instance::Plain(i) | Instance::Coset(i) => match &i.derived.params {
                Some(p) => {
                    let r = p.radius(i.code.n());
                    (t as f64 + rho as f64 / 2.0 <= r, format!("t + ρ/2 ≤ σn = {r:.4}"))
                }
                None if i.derived.strong_expansion => (false, "γ = 0 gives no finite decoding parameters".into()),
                None => (false, "no guaranteed radius (weak expansion)".into()),
            },
            Instance::Lt(i) => {
                let budget = lt_budget(&i.code);
                let ok = i.code.constants.hypotheses_hold && 2 * t + rho <= budget;
                (ok, format!("2t + ρ ≤ (1 − R − ε)n, i.e. ≤ {budget}"))
            }
            Instance::Gmd(i) => {
                let r = i.code.product_radius();
                (
                    (t as f64) < r && rho == 0,
                    format!("fewer than {r} inner symbol errors, no erasures"),
                )
            }
        }
    }
}

/// `⌊(1 − R − ε) n⌋`.
pub fn lt_budget(code: &LtCode) -> usize {
    let d = &code.design;
    let rate = *d.rate.numer() as f64 / *d.rate.denom() as f64;
    ((1.0 - rate - d.epsilon) * d.n as f64 + 1e-9).floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub errors: usize,
    pub erasures: usize,
    pub trials: u64,
    pub seed: u64,
}

/// One trial. For `lt`, `rounds` and `calls` count the coset stage and
/// `dist` is the number of wrong mediator symbols after the first stage;
/// for `gmd`, `rounds` counts outer decoder calls, `calls` sums their
/// component calls and `dist` is the validated distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub success: bool,
    pub rounds: usize,
    pub calls: usize,
    pub dist: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: String,
    pub channel: Channel,
    pub within_contract: bool,
    pub contract: String,
    pub successes: u64,
    pub success_rate: f64,
    pub max_rounds: usize,
    pub max_calls: usize,
    pub max_dist: Option<usize>,
    /// Round bound: ν, or the GMD ladder length.
    pub nu: Option<usize>,
    pub omega_n_bound: Option<f64>,
    /// `dist` must stay below this: `μn` for `lt`.
    pub dist_bound: Option<f64>,
}

impl RunReport {
    /// Rounds never exceed `nu`; the call and distance bounds are only
    /// promised inside the contract.
    pub fn bounds_hold(&self) -> bool {
        let promised = self.omega_n_bound.is_none_or(|b| self.max_calls as f64 <= b)
            && match (self.max_dist, self.dist_bound) {
                (Some(d), Some(b)) => (d as f64) < b,
                _ => true,
            };
        self.nu.is_none_or(|nu| self.max_rounds <= nu) && (promised || !self.within_contract)
    }

    /// A failure or a violated bound on a channel inside the contract.
    pub fn contract_violated(&self) -> bool {
        self.within_contract && (self.successes < self.channel.trials || !self.bounds_hold())
    }
}

pub fn run(inst: &Instance, ch: &Channel, parallel: bool) -> Result<(RunReport, Vec<TrialRow>), HarnessError> {
    let n = inst.n();
    if let Instance::Gmd(i) = inst {
        if ch.erasures > 0 {
            return Err(HarnessError::Usage("gmd runs take inner symbol errors only".into()));
        }
        let cells = n * i.code.inner.length();
        if ch.errors > cells {
            return Err(HarnessError::Usage(format!("at most {cells} inner symbol errors")));
        }
    } else {
        if ch.errors + ch.erasures > n {
            return Err(HarnessError::Usage(format!("t + ρ must not exceed n = {n}")));
        }
    }
    let one = |trial: u64| trial_once(inst, ch, trial);
    let rows: Vec<TrialRow> = if parallel {
        (0..ch.trials).into_par_iter().map(one).collect::<Result<_, _>>()?
    } else {
        (0..ch.trials).map(one).collect::<Result<_, _>>()?
    };
    let (within_contract, contract) = inst.contract(ch.errors, ch.erasures);
    let (nu, omega_n_bound, dist_bound) = match inst {
        Instance::Plain(i) | Instance::Coset(i) => match &i.derived.params {
            Some(p) => (Some(p.nu), Some(p.call_budget(n)), None),
            None => (Some(DecodeParams::unguaranteed(n).nu), None, None),
        },
        Instance::Lt(i) => {
            let p = &i.code.constants.coset_params;
            (Some(p.nu), Some(p.call_budget(n)), Some(i.code.constants.mu * n as f64))
        }
        Instance::Gmd(i) => (Some(i.code.ladder_len()), None, Some(i.code.product_radius())),
    };
    let successes = rows.iter().filter(|r| r.success).count() as u64;
    let report = RunReport {
        mode: inst.mode().into(),
        channel: *ch,
        within_contract,
        contract,
        successes,
        success_rate: if ch.trials == 0 {
            1.0
        } else {
            successes as f64 / ch.trials as f64
        },
        max_rounds: rows.iter().map(|r| r.rounds).max().unwrap_or(0),
        max_calls: rows.iter().map(|r| r.calls).max().unwrap_or(0),
        max_dist: rows.iter().filter_map(|r| r.dist).max(),
        nu,
        omega_n_bound,
        dist_bound,
    };
    Ok((report, rows))
}

fn params_of(i: &TannerInstance) -> DecodeParams {
    i.derived
        .params
        .unwrap_or_else(|| DecodeParams::unguaranteed(i.code.n()))
}

/// Words of `(G, C' : C'')` stripped of their `C'` constraint: every `V''`
/// block is a random `C''` codeword; returns the word and the `C'`
/// syndromes of its `V'` blocks.
pub fn random_coset_word<R: rand::Rng + ?Sized>(code: &TannerCode, rng: &mut R) -> (Vec<u32>, Vec<Vec<u32>>) {
    let g = code.graph();
    let f = code.field();
    let mut z = vec![0u32; code.length()];
    for v in 0..code.n() {
        let msg = random_vector(&f, code.c_double().dim(), rng);
        let block = code
            .c_double()
            .encode(&msg)
            .expect("message has the component dimension");
        for (&e, x) in g.right_edges(v).iter().zip(block) {
            z[e as usize] = x;
        }
    }
    let cosets = (0..code.n())
        .map(|u| code.c_prime().syndrome(&z[g.left_edges(u)]))
        .collect();
    (z, cosets)
}

fn trial_once(inst: &Instance, ch: &Channel, trial: u64) -> Result<TrialRow, HarnessError> {
    let mut rng = trial_rng(ch.seed, trial);
    let row = |success, rounds, calls, dist| TrialRow {
        trial,
        success,
        rounds,
        calls,
        dist,
    };
    match inst {
        Instance::Plain(i) => {
            let code = &i.code;
            let msg = random_vector(&code.field(), code.dimension(), &mut rng);
            let c = code.encode_generic(&msg).map_err(BuildError::from)?;
            let phi = code.psi(&c).map_err(BuildError::from)?;
            let pattern = Pattern::sample(code.n(), ch.errors, ch.erasures, &mut rng);
            let y = corrupt_phi(&code.field(), &phi, &pattern, &mut rng);
            let rep = decode_phi(code, &y, &params_of(i), None);
            Ok(row(
                rep.result.as_ref() == Some(&phi),
                rep.rounds_run,
                rep.component_calls,
                None,
            ))
        }
        Instance::Coset(i) => {
            let code = &i.code;
            let (z, cosets) = random_coset_word(code, &mut rng);
            let g = code.graph();
            let phi = PhiWord::from_symbols((0..code.n()).map(|u| z[g.left_edges(u)].to_vec()).collect());
            let pattern = Pattern::sample(code.n(), ch.errors, ch.erasures, &mut rng);
            let y = corrupt_phi(&code.field(), &phi, &pattern, &mut rng);
            let rep = decode_phi(code, &y, &params_of(i), Some(&cosets));
            Ok(row(
                rep.result.as_ref() == Some(&phi),
                rep.rounds_run,
                rep.component_calls,
                None,
            ))
        }
        Instance::Lt(i) => {
            let code = &i.code;
            let f = code.field();
            let eta: Vec<Vec<u32>> = (0..code.n())
                .map(|_| random_vector(&f, code.block_len(), &mut rng))
                .collect();
            let cw = lt_encode(code, &eta)?;
            let pattern = Pattern::sample(code.n(), ch.errors, ch.erasures, &mut rng);
            let mut y: Vec<LtReceived> = cw.x.iter().map(|x| LtReceived::from_symbol(code, Some(x))).collect();
            for &u in &pattern.erasures {
                y[u] = LtReceived::from_symbol(code, None);
            }
            for &u in &pattern.errors {
                let s = other_symbol(&f, &cw.x[u], &mut rng);
                y[u] = LtReceived::from_symbol(code, Some(&s));
            }
            let rep = lt_decode(code, &y)?;
            let dist = rep.w_tilde.iter().zip(&cw.w).filter(|(a, b)| a != b).count();
            let (rounds, calls) = rep.coset.as_ref().map_or((0, 0), |c| (c.rounds_run, c.component_calls));
            Ok(row(rep.eta.as_ref() == Some(&eta), rounds, calls, Some(dist)))
        }
        Instance::Gmd(i) => {
            let code = &i.code;
            let msg = random_vector(&code.outer.field(), code.outer.dimension(), &mut rng);
            let x = concat_encode(code, &msg)?;
            let mut y = x;
            corrupt_rows(&code.inner_field(), &mut y, ch.errors, &mut rng);
            let res = gmd_decode(code, &y)?;
            let calls = res.trace.attempts.iter().map(|a| a.component_calls).sum();
            Ok(row(
                res.message.as_ref() == Some(&msg),
                res.outer_calls(),
                calls,
                res.distance,
            ))
        }
    }
}

/// One line of a bound audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> BoundCheck {
    BoundCheck {
        name: name.into(),
        pass,
        detail,
    }
}

fn graph_checks(label: &str, g: &BipartiteRegularGraph, gamma: f64, out: &mut Vec<BoundCheck>) {
    let res = top_eigen_residual(g);
    out.push(check(
        &format!("{label}top eigenpair"),
        res <= 1e-9,
        format!("residual {res:.3e}"),
    ));
    if g.n() <= SWEEP_LIMIT.min(4) {
        match exhaustive_sweep(g, gamma) {
            Ok(s) => {
                out.push(check(
                    &format!("{label}mixing inequality"),
                    s.mixing_failures == 0,
                    format!("{} of {} functions violate", s.mixing_failures, s.mixing_cases),
                ));
                out.push(check(
                    &format!("{label}degree sum"),
                    s.degree_failures == 0,
                    format!("{} of {} subset pairs violate", s.degree_failures, s.degree_cases),
                ));
            }
            Err(e) => out.push(check(&format!("{label}exhaustive sweep"), false, e.to_string())),
        }
    }
}

fn tanner_checks(code: &TannerCode, d: &Derived, out: &mut Vec<BoundCheck>) {
    graph_checks("", code.graph(), d.gamma, out);
    out.push(check(
        "expansion hypothesis",
        d.strong_expansion,
        format!(
            "sqrt(θδ) = {:.4}, 2γ = {:.4}",
            (d.theta * d.delta).sqrt(),
            2.0 * d.gamma
        ),
    ));
    let per_edge = d.dimension as f64 / code.length() as f64;
    out.push(check(
        "rate bound",
        per_edge + 1e-12 >= d.rate_bound,
        format!("dim/(Δn) = {per_edge:.4} ≥ r + R − 1 = {:.4}", d.rate_bound),
    ));
    let space = (code.field().modulus() as f64).powi(d.dimension as i32);
    if space <= BRUTE_LIMIT {
        let bound = (code.n() as f64 * min_dist_bound(d.theta, d.delta, d.gamma) - 1e-9).ceil();
        match code.brute_min_phi_weight() {
            Ok(w) => out.push(check(
                "minimum distance",
                w as f64 >= bound,
                format!("exhaustive minimum Φ-weight {w} ≥ {bound}"),
            )),
            Err(e) => out.push(check("minimum distance", false, e.to_string())),
        }
    }
}

/// Structural bounds of the instance, then the round, call and distance
/// bounds of every stored run on it.
pub fn verify_bounds(inst: &Instance, runs: &[RunReport]) -> Vec<BoundCheck> {
    let mut out = Vec::new();
    match inst {
        Instance::Plain(i) | Instance::Coset(i) => tanner_checks(&i.code, &i.derived, &mut out),
        Instance::Gmd(i) => {
            tanner_checks(&i.code.outer, &i.outer, &mut out);
            out.push(check(
                "outer calls per decode",
                true,
                format!("ladder length {}", i.code.ladder_len()),
            ));
        }
        Instance::Lt(i) => {
            let code = &i.code;
            let d = &code.design;
            let c = &code.constants;
            graph_checks("G₁ ", code.stage1().graph(), c.gamma1, &mut out);
            graph_checks("G₂ ", code.g2(), c.gamma2, &mut out);
            out.push(check(
                "degree identity",
                d.identity_holds(),
                format!("(1 − r₀)Δ₁ = r_m R Δ₂ with Δ₁ = {}, Δ₂ = {}", d.delta1, d.delta2),
            ));
            let expect = d.rate * num_rational::Ratio::new(d.delta1 as u64, (d.delta1 + d.delta2) as u64);
            out.push(check(
                "rate identity",
                code.measured_rate() == expect,
                format!("measured {} = RΔ₁/(Δ₁+Δ₂) = {}", code.measured_rate(), expect),
            ));
            out.push(check(
                "decoder hypotheses",
                c.hypotheses_hold,
                format!(
                    "β₁ = {:.4} > σ = {:.4}, τ = {:.4} < μ = {:.4}",
                    c.beta1, c.sigma, c.tau_bound, c.mu
                ),
            ));
        }
    }
    for (k, r) in runs.iter().enumerate() {
        let name = format!(
            "run {k} ({}, t = {}, ρ = {})",
            r.mode, r.channel.errors, r.channel.erasures
        );
        if r.mode != inst.mode() {
            out.push(check(&name, false, format!("report is for mode {}", r.mode)));
            continue;
        }
        out.push(check(
            &format!("{name} bounds"),
            r.bounds_hold(),
            format!(
                "rounds {} (bound {:?}), calls {} (bound {:?}), dist {:?} (bound {:?})",
                r.max_rounds, r.nu, r.max_calls, r.omega_n_bound, r.max_dist, r.dist_bound
            ),
        ));
        if r.within_contract {
            out.push(check(
                &format!("{name} success"),
                r.successes == r.channel.trials,
                format!("{}/{} inside {}", r.successes, r.channel.trials, r.contract),
            ));
        }
    }
    out
}
