//! Iterative error-erasure decoding of folded graph codes.
//!
//! The decoder alternates between the two sides of the graph. It first
//! expands every received `Φ`-symbol into its `V'` sub-block (erased symbols
//! become Δ erasures), then in round 2 runs the `C''` error-erasure decoder
//! on every `V''` sub-block, in round 3 the `C'` errors-only decoder on
//! every `V'` sub-block, and so on up to round ν. A component failure
//! leaves the sub-block as it was. In the coset variant the `V'` symbols are
//! whole sub-blocks and round `i` odd decodes into the coset of `C'` given
//! by the per-vertex syndrome.
//!
//! With dirty scheduling a vertex is revisited only when its sub-block was
//! modified by the previous round; this is what keeps the number of
//! component decoder calls linear in `n`. Decoding stops early once the
//! word is in the code after a `V'` round.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tanner::{PhiWord, TannerCode};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("need γ > 0, got {0}")]
    NonPositiveGamma(f64),
    #[error("sqrt(θδ) = {lhs} is not greater than 2γ = {rhs}")]
    WeakExpansion { lhs: f64, rhs: f64 },
    #[error("need 0 < σ < β, got σ = {sigma}, β = {beta}")]
    SigmaOutOfRange { sigma: f64, beta: f64 },
    #[error("θ and δ must lie in (0, 1], got θ = {theta}, δ = {delta}")]
    BadRates { theta: f64, delta: f64 },
}

/// Constants of the decoding radius and round/call budgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodeParams {
    pub sigma: f64,
    pub beta: f64,
    /// Contraction base `θδ / (4γ²)`.
    pub base: f64,
    /// Number of rounds; odd and at least 3.
    pub nu: usize,
    /// Rounds after which the error fraction has fallen below `1/(Δn)`.
    pub i_t: usize,
    /// Bound on component decoder calls per vertex.
    pub omega: f64,
    /// False for [`DecodeParams::unguaranteed`].
    pub guaranteed: bool,
}

impl DecodeParams {
    /// Largest `t + ρ/2` inside the guaranteed radius, `σn`.
    pub fn radius(&self, n: usize) -> f64 {
        self.sigma * n as f64
    }

    pub fn call_budget(&self, n: usize) -> f64 {
        self.omega * n as f64
    }

    /// Round budget for codes outside the guaranteed regime: no radius, no
    /// call bound (`omega` is zero and meaningless), and `2n + 1` rounds (enough for every vertex to be
    /// revisited after each change on the other side).
    pub fn unguaranteed(n: usize) -> Self {
        DecodeParams {
            sigma: 0.0,
            beta: 0.0,
            base: 0.0,
            nu: 2 * n + 1,
            i_t: 0,
            omega: 0.0,
            guaranteed: false,
        }
    }
}

/// `β = (δ/2 − γ sqrt(δ/θ)) / (1 − γ)`.
pub fn beta(theta: f64, delta: f64, gamma: f64) -> f64 {
    (delta / 2.0 - gamma * (delta / theta).sqrt()) / (1.0 - gamma)
}

/// Radius and budgets for decoding with `σn` as the bound on `t + ρ/2`.
///
/// When `β sqrt(σn) ≤ σ` the logarithm in the round count is not positive
/// and ν is clamped to 3.
pub fn decode_params(
    theta: f64,
    delta: f64,
    gamma: f64,
    sigma: f64,
    n: usize,
    degree: usize,
) -> Result<DecodeParams, ParamError> {
    if !(theta > 0.0 && theta <= 1.0 && delta > 0.0 && delta <= 1.0) {
        return Err(ParamError::BadRates { theta, delta });
    }
    if gamma <= 0.0 {
        return Err(ParamError::NonPositiveGamma(gamma));
    }
    let lhs = (theta * delta).sqrt();
    if lhs <= 2.0 * gamma {
        return Err(ParamError::WeakExpansion { lhs, rhs: 2.0 * gamma });
    }
    let beta = beta(theta, delta, gamma);
    if !(sigma > 0.0 && sigma < beta) {
        return Err(ParamError::SigmaOutOfRange { sigma, beta });
    }
    let base = theta * delta / (4.0 * gamma * gamma);
    let log = |x: f64| x.ln() / base.ln();
    let arg = (beta * (sigma * n as f64).sqrt() - sigma) / (beta - sigma);
    let nu = if arg > 1.0 {
        2 * log(arg).floor() as usize + 3
    } else {
        3
    };
    let arg_t = degree as f64 * beta * sigma.sqrt() / (beta - sigma);
    let i_t = if arg_t > 1.0 { 2 * log(arg_t).ceil() as usize } else { 0 };
    let ratio = 1.0 / base;
    let omega = i_t as f64 + (1.0 + theta / delta) / (1.0 - ratio * ratio);
    Ok(DecodeParams {
        sigma,
        beta,
        base,
        nu,
        i_t,
        omega,
        guaranteed: true,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// One executed round.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub round: usize,
    pub side: Side,
    pub visited: usize,
    /// Sub-blocks on the active side that differ from the transmitted word
    /// after the round (only when the transmitted word is known).
    pub wrong_blocks: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub result: Option<PhiWord>,
    /// The decoded word over `F`, when decoding succeeded.
    pub codeword: Option<Vec<u32>>,
    pub rounds_run: usize,
    pub component_calls: usize,
    pub converged_early: bool,
    pub trace: Vec<RoundTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub status: String,
    pub rounds: usize,
    pub calls: usize,
    pub omega_bound: f64,
    pub nu: usize,
}

impl DecodeReport {
    pub fn is_success(&self) -> bool {
        self.result.is_some()
    }

    pub fn summary(&self, params: &DecodeParams, n: usize) -> ReportSummary {
        ReportSummary {
            status: if self.is_success() { "success" } else { "failure" }.into(),
            rounds: self.rounds_run,
            calls: self.component_calls,
            omega_bound: params.call_budget(n),
            nu: params.nu,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DecodeOptions<'a> {
    /// Revisit only vertices whose sub-block changed in the previous round.
    pub dirty: bool,
    /// Decode the vertices of a round in parallel.
    pub parallel: bool,
    /// The transmitted word over `F`, for per-round error counts.
    pub truth: Option<&'a [u32]>,
}

impl Default for DecodeOptions<'_> {
    fn default() -> Self {
        DecodeOptions {
            dirty: true,
            parallel: true,
            truth: None,
        }
    }
}

/// Decodes `y` with the default options.
pub fn decode_phi(code: &TannerCode, y: &PhiWord, params: &DecodeParams, cosets: Option<&[Vec<u32>]>) -> DecodeReport {
    decode_phi_with(code, y, params, cosets, &DecodeOptions::default())
}

pub fn decode_phi_with(
    code: &TannerCode,
    y: &PhiWord,
    params: &DecodeParams,
    cosets: Option<&[Vec<u32>]>,
    opts: &DecodeOptions,
) -> DecodeReport {
    let g = code.graph();
    let n = code.n();
    let deg = code.degree();
    let width = if cosets.is_some() { deg } else { code.phi_width() };
    assert_eq!(y.len(), n, "received word has wrong length");
    if let Some(s) = cosets {
        assert_eq!(s.len(), n, "one syndrome per vertex");
    }

    let mut z = vec![0u32; code.length()];
    let mut erased = vec![false; code.length()];
    for (u, entry) in y.entries.iter().enumerate() {
        let range = g.left_edges(u);
        match entry {
            Some(sym) => {
                assert_eq!(sym.len(), width, "symbol has wrong width");
                if cosets.is_some() {
                    z[range].copy_from_slice(sym);
                } else {
                    let block = code.c_prime().encode_systematic(sym).expect("width checked");
                    z[range].copy_from_slice(&block);
                }
            }
            None => erased[range].iter_mut().for_each(|x| *x = true),
        }
    }

    let wrong = |z: &[u32], side: Side| -> Option<usize> {
        let t = opts.truth?;
        Some(
            (0..n)
                .filter(|&x| match side {
                    Side::Left => g.left_edges(x).any(|e| z[e] != t[e]),
                    Side::Right => g.right_edges(x).iter().any(|&e| z[e as usize] != t[e as usize]),
                })
                .count(),
        )
    };

    let mut dirty_left = vec![true; n];
    let mut dirty_right = vec![true; n];
    let mut calls = 0usize;
    let mut trace = Vec::new();
    let mut converged_early = false;
    let mut rounds_run = 0usize;
    for round in 2..=params.nu.max(3) {
        let side = if round % 2 == 0 { Side::Right } else { Side::Left };
        let active: Vec<usize> = {
            let flags = if side == Side::Right { &dirty_right } else { &dirty_left };
            (0..n).filter(|&x| !opts.dirty || flags[x]).collect()
        };
        let decode_one = |x: usize| -> Option<Vec<u32>> {
            match side {
                Side::Right => {
                    let edges = g.right_edges(x);
                    if round == 2 {
                        let word: Vec<Option<u32>> = edges
                            .iter()
                            .map(|&e| (!erased[e as usize]).then_some(z[e as usize]))
                            .collect();
                        code.c_double().decode(&word).ok()
                    } else {
                        let word: Vec<u32> = edges.iter().map(|&e| z[e as usize]).collect();
                        code.c_double().decode_errors_only(&word).ok()
                    }
                }
                Side::Left => {
                    let word = &z[g.left_edges(x)];
                    match cosets {
                        Some(s) => code.c_prime().coset_decode(&s[x], word).ok(),
                        None => code.c_prime().decode_errors_only(word).ok(),
                    }
                }
            }
        };
        let decoded: Vec<(usize, Option<Vec<u32>>)> = if opts.parallel {
            active.par_iter().map(|&x| (x, decode_one(x))).collect()
        } else {
            active.iter().map(|&x| (x, decode_one(x))).collect()
        };
        calls += active.len();

        let (this, other) = match side {
            Side::Right => (&mut dirty_right, &mut dirty_left),
            Side::Left => (&mut dirty_left, &mut dirty_right),
        };
        this.iter_mut().for_each(|d| *d = false);
        for (x, block) in decoded {
            let Some(block) = block else { continue };
            for (slot, val) in block.into_iter().enumerate() {
                let (e, nbr) = match side {
                    Side::Right => {
                        let e = g.right_edges(x)[slot] as usize;
                        (e, g.left_endpoint(e))
                    }
                    Side::Left => {
                        let e = x * deg + slot;
                        (e, g.right_endpoint(e))
                    }
                };
                if z[e] != val || erased[e] {
                    z[e] = val;
                    erased[e] = false;
                    other[nbr] = true;
                }
            }
        }
        if round == 2 {
            // blocks whose decoding failed keep their erasures; fill them
            // so the later rounds see ordinary (wrong) symbols
            for e in 0..erased.len() {
                if erased[e] {
                    erased[e] = false;
                    z[e] = 0;
                    other[g.left_endpoint(e)] = true;
                }
            }
        }
        rounds_run += 1;
        trace.push(RoundTrace {
            round,
            side,
            visited: active.len(),
            wrong_blocks: wrong(&z, side),
        });
        if side == Side::Left && round < params.nu && in_code(code, &z, cosets) {
            converged_early = true;
            break;
        }
    }

    let success = in_code(code, &z, cosets);
    let result = success.then(|| {
        PhiWord::from_symbols(
            (0..n)
                .map(|u| {
                    let block = &z[g.left_edges(u)];
                    if cosets.is_some() {
                        block.to_vec()
                    } else {
                        code.c_prime().systematic_part(block).to_vec()
                    }
                })
                .collect(),
        )
    });
    DecodeReport {
        result,
        codeword: success.then_some(z),
        rounds_run,
        component_calls: calls,
        converged_early,
        trace,
    }
}

fn in_code(code: &TannerCode, z: &[u32], cosets: Option<&[Vec<u32>]>) -> bool {
    match cosets {
        Some(s) => code.membership_coset(z, s),
        None => code.membership(z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_examples() {
        let p = decode_params(0.5, 0.5, 0.125, 0.07, 100, 36).unwrap();
        assert!((p.beta - 1.0 / 7.0).abs() < 1e-12);
        assert!((p.base - 4.0).abs() < 1e-12);
        assert_eq!(p.i_t, 6);
        assert!((p.omega - (6.0 + 32.0 / 15.0)).abs() < 1e-12);
        assert!((p.omega - 8.133).abs() < 1e-3);
        assert_eq!(p.nu % 2, 1);
    }

    #[test]
    fn nu_example() {
        // θ = δ = 2/3, γ = 1/6 give base 4 and β = 0.2
        let p = decode_params(2.0 / 3.0, 2.0 / 3.0, 1.0 / 6.0, 0.1, 1000, 36).unwrap();
        assert!((p.base - 4.0).abs() < 1e-12);
        assert!((p.beta - 0.2).abs() < 1e-12);
        // (0.2 * 10 - 0.1) / 0.1 = 19 and log_4 19 ≈ 2.12
        assert_eq!(p.nu, 7);
    }

    #[test]
    fn params_errors() {
        assert!(matches!(
            decode_params(0.5, 0.5, 0.3, 0.01, 100, 36),
            Err(ParamError::WeakExpansion { .. })
        ));
        assert!(matches!(
            decode_params(0.5, 0.5, 0.125, 0.2, 100, 36),
            Err(ParamError::SigmaOutOfRange { .. })
        ));
        assert_eq!(
            decode_params(0.5, 0.5, 0.0, 0.01, 100, 36),
            Err(ParamError::NonPositiveGamma(0.0))
        );
        assert!(decode_params(0.0, 0.5, 0.1, 0.01, 100, 36).is_err());
    }

    #[test]
    fn tiny_radius_clamps_nu() {
        let p = decode_params(0.5, 0.5, 0.125, 0.14, 1, 36).unwrap();
        assert_eq!(p.nu, 3);
    }
}
