//! Building graph-code instances from a small configuration and recording
//! their measured and derived constants.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigraph::{gamma, random_regular_bipartite, GraphError, GraphOptions};
use crate::gf::{GfError, PrimeField};
use crate::grs::{GrsCode, GrsError};
use crate::iterdec::{beta, decode_params, DecodeParams, ParamError};
use crate::tanner::{min_dist_bound, rate_bound_phi, TannerCode, TannerError};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Grs(#[from] GrsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tanner(#[from] TannerError),
    #[error("{0}")]
    Params(#[from] ParamError),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

fn yes() -> bool {
    true
}

fn default_resamples() -> usize {
    50
}

fn default_sigma_fraction() -> f64 {
    0.9
}

/// Parameters of a graph code `(G, C' : C'')` with standard GRS components
/// (evaluation points `1..=Δ`, unit multipliers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TannerConfig {
    pub n: usize,
    pub degree: usize,
    pub q: u32,
    pub k_prime: usize,
    pub k_double: usize,
    pub seed: u64,
    #[serde(default)]
    pub gamma_target: Option<f64>,
    #[serde(default)]
    pub refine_steps: usize,
    #[serde(default = "default_resamples")]
    pub max_resamples: usize,
    #[serde(default = "yes")]
    pub simple: bool,
    /// The decoding radius is `σ = sigma_fraction · β`.
    #[serde(default = "default_sigma_fraction")]
    pub sigma_fraction: f64,
}

impl TannerConfig {
    /// Simple random graph, no γ target or refinement.
    pub fn new(n: usize, degree: usize, q: u32, k_prime: usize, k_double: usize, seed: u64) -> Self {
        TannerConfig {
            n,
            degree,
            q,
            k_prime,
            k_double,
            seed,
            gamma_target: None,
            refine_steps: 0,
            max_resamples: default_resamples(),
            simple: true,
            sigma_fraction: default_sigma_fraction(),
        }
    }

    pub fn graph_options(&self) -> GraphOptions {
        GraphOptions {
            simple: self.simple,
            gamma_target: self.gamma_target,
            max_resamples: self.max_resamples,
            refine_steps: self.refine_steps,
        }
    }
}

/// Measured and derived constants of a graph code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Derived {
    pub n: usize,
    pub degree: usize,
    pub q: u32,
    pub k_prime: usize,
    pub k_double: usize,
    pub dimension: usize,
    pub theta: f64,
    pub delta: f64,
    pub gamma: f64,
    pub ramanujan_bound: f64,
    pub ramanujan: bool,
    pub min_dist_bound: f64,
    /// `r + R − 1`.
    pub rate_bound: f64,
    pub rate_bound_phi: f64,
    pub beta: f64,
    /// `sqrt(θδ) > 2γ`.
    pub strong_expansion: bool,
    /// `None` when γ = 0 (no finite round count) or the hypothesis fails.
    pub params: Option<DecodeParams>,
}

impl Derived {
    /// `theta` overrides `d'/Δ` (the coset variant uses the distance of
    /// the code whose cosets are decoded).
    pub fn measure(code: &TannerCode, theta: f64, sigma_fraction: f64) -> Result<Self, BuildError> {
        let spectrum = gamma(code.graph())?;
        let gam = spectrum.gamma;
        let delta = code.delta();
        let r = code.c_prime().rate();
        let big_r = code.c_double().rate();
        let b = beta(theta, delta, gam);
        let strong_expansion = (theta * delta).sqrt() > 2.0 * gam;
        let params = strong_expansion
            .then(|| decode_params(theta, delta, gam, sigma_fraction * b, code.n(), code.degree()).ok())
            .flatten();
        Ok(Derived {
            n: code.n(),
            degree: code.degree(),
            q: code.field().modulus(),
            k_prime: code.c_prime().dim(),
            k_double: code.c_double().dim(),
            dimension: code.dimension(),
            theta,
            delta,
            gamma: gam,
            ramanujan_bound: spectrum.ramanujan_bound,
            ramanujan: spectrum.is_ramanujan(),
            min_dist_bound: min_dist_bound(theta, delta, gam),
            rate_bound: r + big_r - 1.0,
            rate_bound_phi: rate_bound_phi(r, big_r),
            beta: b,
            strong_expansion,
            params,
        })
    }
}

/// A code together with the configuration it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TannerInstance {
    pub config: TannerConfig,
    pub code: TannerCode,
    pub derived: Derived,
}

impl TannerInstance {
    /// Builds the code described by `config`. Unless `allow_weak`, refuses
    /// graphs whose measured γ violates `sqrt(θδ) > 2γ`.
    pub fn build(config: &TannerConfig, allow_weak: bool) -> Result<Self, BuildError> {
        let field = PrimeField::new(config.q)?;
        if config.degree >= config.q as usize {
            return Err(BuildError::Infeasible(format!(
                "Δ = {} needs q > Δ for distinct nonzero evaluation points (q = {})",
                config.degree, config.q
            )));
        }
        let graph = random_regular_bipartite(config.n, config.degree, config.seed, &config.graph_options())?;
        let c_prime = GrsCode::standard(field, config.degree, config.k_prime)?;
        let c_double = GrsCode::standard(field, config.degree, config.k_double)?;
        let code = TannerCode::new(graph, c_prime, c_double)?;
        let derived = Derived::measure(&code, code.theta(), config.sigma_fraction)?;
        log::info!(
            "n = {}, Δ = {}: γ = {:.5}, β = {:.5}, dimension {}",
            config.n,
            config.degree,
            derived.gamma,
            derived.beta,
            derived.dimension
        );
        if !derived.strong_expansion && !allow_weak {
            return Err(BuildError::Infeasible(format!(
                "sqrt(θδ) = {:.4} is not greater than 2γ = {:.4}",
                (derived.theta * derived.delta).sqrt(),
                2.0 * derived.gamma
            )));
        }
        Ok(TannerInstance {
            config: config.clone(),
            code,
            derived,
        })
    }
}
