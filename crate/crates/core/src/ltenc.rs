//! A linear-time encodable nearly-MDS code built from two graph codes and
//! a mediator code.
//!
//! The message `η` (one `C₁` message per vertex of `V''`) is spread over
//! `G₁` by per-vertex `C₁` encoding. The `C₀`-syndromes `h_u` of the `V'`
//! sub-blocks are collected into a list `s`, protected by the mediator code
//! `C_m`, and the mediator codeword is spread over `G₂` by per-vertex `C₂`
//! encoding. Symbol `u` of the codeword is the pair of `V'` sub-blocks
//! `((c)_{E₁(u)}, (d)_{E₂(u)})`.
//!
//! Decoding reverses this: one round of `C₂` decoding recovers most of the
//! mediator word, the mediator decoder recovers `s` exactly, and coset
//! iterative decoding of `(G₁, C₀ : C₁)` with the syndromes `s` recovers
//! `η`.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigraph::{gamma, random_regular_bipartite, BipartiteRegularGraph, GraphError, GraphOptions};
use crate::gf::{next_prime_above, GfError, PrimeField, MAX_MODULUS};
use crate::grs::{DecodeFailure, GrsCode, GrsError};
use crate::iterdec::{beta, decode_params, decode_phi, DecodeParams, DecodeReport};
use crate::tanner::{PhiWord, TannerCode, TannerError};

#[derive(Debug, Error)]
pub enum LtError {
    #[error("invalid design parameters: {0}")]
    Design(String),
    #[error("no prime field with {lower} < q <= {MAX_MODULUS}")]
    NoPrime { lower: u32 },
    #[error("mediator code: {0}")]
    Mediator(String),
    #[error("decoder hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("expected {expected} blocks/entries, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Grs(#[from] GrsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Tanner(#[from] TannerError),
}

fn ratio_f64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Integer parameters of the construction together with the asymptotic
/// constants they are measured against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtDesign {
    pub n: usize,
    /// Rate `R` of `C₁` and `C₂`.
    pub rate: Ratio<u64>,
    pub epsilon: f64,
    /// Target mediator rate; the mediator is built with rate exactly `κ`.
    pub kappa: Ratio<u64>,
    pub mu: f64,
    /// `8 (1 − R) max{R/μ, 2/κ}`.
    pub alpha_r: f64,
    /// `κ ε`, the lower bound on the relative distance of `C₀`.
    pub theta0_target: f64,
    /// `α_R / ε³`, the degree the asymptotic analysis asks for.
    pub asymptotic_delta1: f64,
    /// Set when `Δ₁` is below `asymptotic_delta1`.
    pub relaxed: bool,
    pub delta1: usize,
    pub delta2: usize,
    /// Dimension of `C₀`.
    pub k0: usize,
    pub q: u32,
}

impl LtDesign {
    /// Length `(1 − r₀)Δ₁` of each syndrome `h_u`.
    pub fn syndrome_len(&self) -> usize {
        self.delta1 - self.k0
    }

    pub fn k1(&self) -> usize {
        (self.rate * Ratio::from(self.delta1 as u64)).to_integer() as usize
    }

    pub fn k2(&self) -> usize {
        (self.rate * Ratio::from(self.delta2 as u64)).to_integer() as usize
    }

    /// Relative distance of `C₀`, `(Δ₁ − k₀ + 1)/Δ₁`.
    pub fn theta0(&self) -> f64 {
        (self.syndrome_len() + 1) as f64 / self.delta1 as f64
    }

    /// `R Δ₁ / (Δ₁ + Δ₂)`.
    pub fn code_rate(&self) -> Ratio<u64> {
        self.rate * Ratio::new(self.delta1 as u64, (self.delta1 + self.delta2) as u64)
    }

    /// `(1 − r₀)Δ₁ = r_m R Δ₂` with `r_m = κ`.
    pub fn identity_holds(&self) -> bool {
        Ratio::from(self.syndrome_len() as u64) == self.kappa * self.rate * Ratio::from(self.delta2 as u64)
    }

    /// `(1 − R − ε)/2`, the decoding radius `(t + ρ/2)/n` aimed at.
    pub fn sigma(&self) -> f64 {
        (1.0 - ratio_f64(self.rate) - self.epsilon) / 2.0
    }

    /// Number of field elements carried by the mediator code.
    pub fn mediator_info_len(&self) -> usize {
        self.n * self.syndrome_len()
    }
}

/// Chooses the integer parameters for length `n`.
///
/// `Δ₁` is the asymptotic `α_R/ε³` when a simple graph of that degree fits
/// on `n` vertices per side and otherwise the largest admissible degree
/// below `n` (`relaxed` is then set). The syndrome length is the smallest
/// one giving `θ₀ ≥ κε` for which `Δ₂ = (1 − r₀)Δ₁/(κR)` is an integer
/// with `RΔ₂` integral and `Δ₂ < Δ₁`; `q` is the least prime above both
/// `Δ₁` and `n`.
pub fn lt_design(rate: Ratio<u64>, epsilon: f64, kappa: Ratio<u64>, mu: f64, n: usize) -> Result<LtDesign, LtError> {
    let r = ratio_f64(rate);
    let k = ratio_f64(kappa);
    if !(0.0 < epsilon && epsilon < r && r < 1.0) {
        return Err(LtError::Design(format!("need 0 < ε < R < 1 (ε = {epsilon}, R = {r})")));
    }
    if !(k > 0.0 && k <= 1.0 && mu > 0.0 && mu <= 1.0) {
        return Err(LtError::Design(format!("need κ, μ in (0, 1] (κ = {k}, μ = {mu})")));
    }
    let alpha_r = 8.0 * (1.0 - r) * (r / mu).max(2.0 / k);
    let asymptotic_delta1 = alpha_r / epsilon.powi(3);
    let step = *rate.denom() as usize;
    let round_up = |x: f64| (x / step as f64).ceil() as usize * step;
    let max_degree = (n.saturating_sub(1) / step) * step;
    let asymptotic = round_up(asymptotic_delta1);
    let (delta1, relaxed) = if asymptotic <= max_degree {
        (asymptotic, false)
    } else {
        (max_degree, true)
    };
    if delta1 < 2 {
        return Err(LtError::Design(format!("n = {n} is too small for R = {rate}")));
    }
    let theta0_target = k * epsilon;
    let first = ((theta0_target * delta1 as f64).ceil() as usize)
        .saturating_sub(1)
        .max(1);
    let kr = kappa * rate;
    let mut found = None;
    for m0 in first..delta1 {
        let d2 = Ratio::from(m0 as u64) / kr;
        if !d2.is_integer() {
            continue;
        }
        let d2 = d2.to_integer();
        if (rate * Ratio::from(d2)).is_integer() && d2 >= 2 && (d2 as usize) < delta1 {
            found = Some((m0, d2 as usize));
            break;
        }
    }
    let Some((m0, delta2)) = found else {
        return Err(LtError::Design(format!(
            "no syndrome length in [{first}, {delta1}) gives an integral Δ₂ < Δ₁ = {delta1}"
        )));
    };
    let lower = delta1.max(n) as u32;
    let q = next_prime_above(lower).ok_or(LtError::NoPrime { lower })?;
    Ok(LtDesign {
        n,
        rate,
        epsilon,
        kappa,
        mu,
        alpha_r,
        theta0_target,
        asymptotic_delta1,
        relaxed,
        delta1,
        delta2,
        k0: delta1 - m0,
        q,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediatorChoice {
    /// Self-hosted when it covers the needed radius, interleaved GRS
    /// otherwise.
    #[default]
    Auto,
    SelfHosted,
    InterleavedGrs,
}

/// A code of length `n` over `F^width` carrying `info_len` field elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MediatorCode {
    /// A graph code over `F` folded to `F^width`, restricted to the span of
    /// its first `info_len` basis vectors and decoded iteratively.
    SelfHosted {
        code: TannerCode,
        info_len: usize,
        params: DecodeParams,
    },
    /// `width` codewords of one GRS code of length `n`, read column-wise.
    InterleavedGrs { code: GrsCode, width: usize },
}

impl MediatorCode {
    /// Self-hosted mediator on a dense random graph of the largest degree
    /// below `min(n, q)`.
    pub fn self_hosted(field: PrimeField, n: usize, width: usize, info_len: usize, seed: u64) -> Result<Self, LtError> {
        let degree = (n - 1).min(field.modulus() as usize - 1);
        let per_vertex = info_len.div_ceil(n);
        if width + 2 > degree || degree + per_vertex < width + 2 {
            return Err(LtError::Mediator(format!(
                "symbols of width {width} do not fit components of length {degree}"
            )));
        }
        let k_double = degree - width + per_vertex;
        if k_double + 1 >= degree {
            return Err(LtError::Mediator(format!(
                "right component [{degree}, {k_double}] is too weak"
            )));
        }
        let graph = random_regular_bipartite(n, degree, seed, &GraphOptions::default())?;
        let code = TannerCode::new(
            graph,
            GrsCode::standard(field, degree, width)?,
            GrsCode::standard(field, degree, k_double)?,
        )?;
        if code.dimension() < info_len {
            return Err(LtError::Mediator(format!(
                "dimension {} below the {info_len} symbols to carry",
                code.dimension()
            )));
        }
        let gam = gamma(code.graph())?.gamma;
        let (theta, delta) = (code.theta(), code.delta());
        let b = beta(theta, delta, gam);
        let params = decode_params(theta, delta, gam, 0.9 * b, n, degree)
            .map_err(|e| LtError::Mediator(format!("no decoding radius: {e}")))?;
        Ok(MediatorCode::SelfHosted { code, info_len, params })
    }

    pub fn interleaved_grs(field: PrimeField, n: usize, width: usize, info_len: usize) -> Result<Self, LtError> {
        if width == 0 || info_len % width != 0 || info_len / width == 0 || info_len / width > n {
            return Err(LtError::Mediator(format!(
                "{info_len} elements do not split into {width} rows of at most {n}"
            )));
        }
        let code = GrsCode::standard(field, n, info_len / width)?;
        Ok(MediatorCode::InterleavedGrs { code, width })
    }

    pub fn n(&self) -> usize {
        match self {
            MediatorCode::SelfHosted { code, .. } => code.n(),
            MediatorCode::InterleavedGrs { code, .. } => code.length(),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            MediatorCode::SelfHosted { code, .. } => code.phi_width(),
            MediatorCode::InterleavedGrs { width, .. } => *width,
        }
    }

    pub fn info_len(&self) -> usize {
        match self {
            MediatorCode::SelfHosted { info_len, .. } => *info_len,
            MediatorCode::InterleavedGrs { code, width } => code.dim() * width,
        }
    }

    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.info_len() as u64, (self.n() * self.width()) as u64)
    }

    /// Number of symbol errors the decoder is guaranteed to correct.
    pub fn max_errors(&self) -> usize {
        match self {
            MediatorCode::SelfHosted { params, code, .. } => params.radius(code.n()).floor() as usize,
            MediatorCode::InterleavedGrs { code, .. } => (code.min_distance() - 1) / 2,
        }
    }

    /// Correctable fraction `μ`: any pattern of at most `μn` symbol errors
    /// is corrected.
    pub fn mu(&self) -> f64 {
        match self {
            MediatorCode::SelfHosted { params, .. } => params.sigma,
            MediatorCode::InterleavedGrs { .. } => self.max_errors() as f64 / self.n() as f64,
        }
    }

    pub fn encode(&self, s: &[u32]) -> Result<Vec<Vec<u32>>, LtError> {
        if s.len() != self.info_len() {
            return Err(LtError::WrongLength {
                expected: self.info_len(),
                got: s.len(),
            });
        }
        match self {
            MediatorCode::SelfHosted { code, .. } => {
                let mut msg = s.to_vec();
                msg.resize(code.dimension(), 0);
                let c = code.encode_generic(&msg)?;
                Ok(code
                    .psi(&c)?
                    .entries
                    .into_iter()
                    .map(|e| e.expect("codeword"))
                    .collect())
            }
            MediatorCode::InterleavedGrs { code, width } => {
                let rows: Vec<Vec<u32>> = s
                    .chunks(code.dim())
                    .map(|info| code.encode_systematic(info))
                    .collect::<Result<_, _>>()?;
                Ok((0..code.length())
                    .map(|v| (0..*width).map(|j| rows[j][v]).collect())
                    .collect())
            }
        }
    }

    pub fn decode(&self, word: &[Vec<u32>]) -> Result<Vec<u32>, DecodeFailure> {
        if word.len() != self.n() || word.iter().any(|w| w.len() != self.width()) {
            return Err(DecodeFailure);
        }
        match self {
            MediatorCode::SelfHosted { code, info_len, params } => {
                let y = PhiWord::from_symbols(word.to_vec());
                let report = decode_phi(code, &y, params, None);
                let c = report.codeword.ok_or(DecodeFailure)?;
                let msg = code.message_of(&c).map_err(|_| DecodeFailure)?;
                if msg[*info_len..].iter().any(|&x| x != 0) {
                    return Err(DecodeFailure);
                }
                Ok(msg[..*info_len].to_vec())
            }
            MediatorCode::InterleavedGrs { code, width } => {
                let mut s = Vec::with_capacity(self.info_len());
                for j in 0..*width {
                    let row: Vec<u32> = word.iter().map(|w| w[j]).collect();
                    let c = code.decode_errors_only(&row)?;
                    s.extend_from_slice(code.systematic_part(&c));
                }
                Ok(s)
            }
        }
    }
}

fn yes() -> bool {
    true
}

/// What to build: the design inputs plus sampling controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LtConfig {
    pub n: usize,
    pub rate: Ratio<u64>,
    pub epsilon: f64,
    pub kappa: Ratio<u64>,
    pub mu: f64,
    pub seed: u64,
    #[serde(default)]
    pub mediator: MediatorChoice,
    #[serde(default)]
    pub gamma2_target: Option<f64>,
    #[serde(default)]
    pub refine_steps: usize,
    #[serde(default = "yes")]
    pub simple: bool,
}

/// Measured constants and the stage hypotheses evaluated on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtConstants {
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta0: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Radius constant of the coset decoding stage.
    pub beta1: f64,
    /// `(1 − R − ε)/2`.
    pub sigma: f64,
    /// Bound on the fraction of wrong mediator symbols after the first
    /// decoding stage, `σ (γ₂ / (δ₂/2 − (1 − γ₂)σ))²`.
    pub tau_bound: f64,
    pub mu: f64,
    pub mediator_rate: Ratio<u64>,
    /// `β₁ > σ` and `τ < μ`.
    pub hypotheses_hold: bool,
    pub coset_params: DecodeParams,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtCode {
    pub design: LtDesign,
    /// `(G₁, C₀ : C₁)`, decoded in cosets of `C₀`.
    stage1: TannerCode,
    g2: BipartiteRegularGraph,
    c2: GrsCode,
    mediator: MediatorCode,
    pub constants: LtConstants,
}

/// Upper bound on the fraction of `V''` vertices of `G₂` left wrong by one
/// round of `C₂` decoding when `t + ρ/2 ≤ σn`.
pub fn tau_bound(sigma: f64, gamma2: f64, delta2: f64) -> f64 {
    let denom = delta2 / 2.0 - (1.0 - gamma2) * sigma;
    if gamma2 == 0.0 && denom > 0.0 {
        0.0
    } else if denom <= 0.0 {
        f64::INFINITY
    } else {
        sigma * (gamma2 / denom).powi(2)
    }
}

impl LtCode {
    pub fn build(config: &LtConfig, allow_weak: bool) -> Result<Self, LtError> {
        let design = lt_design(config.rate, config.epsilon, config.kappa, config.mu, config.n)?;
        Self::from_design(design, config, allow_weak)
    }

    pub fn from_design(design: LtDesign, config: &LtConfig, allow_weak: bool) -> Result<Self, LtError> {
        let field = PrimeField::new(design.q)?;
        let n = design.n;
        let g1 = random_regular_bipartite(
            n,
            design.delta1,
            config.seed,
            &GraphOptions {
                simple: config.simple,
                ..Default::default()
            },
        )?;
        let g2 = random_regular_bipartite(
            n,
            design.delta2,
            config.seed.wrapping_add(1),
            &GraphOptions {
                simple: config.simple,
                gamma_target: config.gamma2_target,
                refine_steps: config.refine_steps,
                ..Default::default()
            },
        )?;
        let c0 = GrsCode::standard(field, design.delta1, design.k0)?;
        let c1 = GrsCode::standard(field, design.delta1, design.k1())?;
        let c2 = GrsCode::standard(field, design.delta2, design.k2())?;
        let stage1 = TannerCode::new(g1, c0, c1)?;

        let gamma1 = gamma(stage1.graph())?.gamma;
        let gamma2 = gamma(&g2)?.gamma;
        let sigma = design.sigma();
        let delta2 = c2.relative_distance();
        let tau = tau_bound(sigma, gamma2, delta2);

        let width = design.k2();
        let info_len = design.mediator_info_len();
        let mediator_seed = config.seed.wrapping_add(2);
        let grs = || MediatorCode::interleaved_grs(field, n, width, info_len);
        let mediator = match config.mediator {
            MediatorChoice::SelfHosted => MediatorCode::self_hosted(field, n, width, info_len, mediator_seed)?,
            MediatorChoice::InterleavedGrs => grs()?,
            MediatorChoice::Auto => match MediatorCode::self_hosted(field, n, width, info_len, mediator_seed) {
                Ok(m) if tau < m.mu() => m,
                _ => grs()?,
            },
        };
        if mediator.rate() != design.kappa {
            return Err(LtError::Mediator(format!(
                "rate {} differs from κ = {}",
                mediator.rate(),
                design.kappa
            )));
        }

        let theta0 = stage1.theta();
        let delta1 = stage1.delta();
        let beta1 = beta(theta0, delta1, gamma1);
        let coset_params = decode_params(theta0, delta1, gamma1, sigma, n, design.delta1);
        let mu = mediator.mu();
        let hypotheses_hold = coset_params.is_ok() && tau < mu;
        if !hypotheses_hold && !allow_weak {
            let mut why = Vec::new();
            if let Err(e) = &coset_params {
                why.push(format!("coset stage: {e}"));
            }
            if tau >= mu {
                why.push(format!("mediator stage: τ bound {tau:.4} is not below μ = {mu:.4}"));
            }
            return Err(LtError::Hypothesis(why.join("; ")));
        }
        let constants = LtConstants {
            gamma1,
            gamma2,
            theta0,
            delta1,
            delta2,
            beta1,
            sigma,
            tau_bound: tau,
            mu,
            mediator_rate: mediator.rate(),
            hypotheses_hold,
            coset_params: coset_params.unwrap_or_else(|_| DecodeParams::unguaranteed(n)),
        };
        Ok(LtCode {
            design,
            stage1,
            g2,
            c2,
            mediator,
            constants,
        })
    }

    pub fn n(&self) -> usize {
        self.design.n
    }

    pub fn field(&self) -> PrimeField {
        self.stage1.field()
    }

    pub fn stage1(&self) -> &TannerCode {
        &self.stage1
    }

    pub fn g2(&self) -> &BipartiteRegularGraph {
        &self.g2
    }

    pub fn c2(&self) -> &GrsCode {
        &self.c2
    }

    pub fn mediator(&self) -> &MediatorCode {
        &self.mediator
    }

    /// Field elements per codeword symbol, `Δ₁ + Δ₂`.
    pub fn symbol_width(&self) -> usize {
        self.design.delta1 + self.design.delta2
    }

    /// Field elements per message block, `RΔ₁`.
    pub fn block_len(&self) -> usize {
        self.design.k1()
    }

    /// Rate measured as message size over codeword size.
    pub fn measured_rate(&self) -> Ratio<u64> {
        Ratio::new(
            (self.n() * self.block_len()) as u64,
            (self.n() * self.symbol_width()) as u64,
        )
    }
}

/// A codeword together with the intermediate words of the encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtCodeword {
    /// Codeword symbols, `x_u = ((c)_{E₁(u)}, (d)_{E₂(u)})`.
    pub x: Vec<Vec<u32>>,
    pub c: Vec<u32>,
    /// The syndromes `h_u`, concatenated.
    pub s: Vec<u32>,
    /// The mediator codeword.
    pub w: Vec<Vec<u32>>,
    pub d: Vec<u32>,
}

/// Writes the `C`-encoding of block `v`'s message onto `E(v)` for every
/// `v ∈ V''`.
fn spread(g: &BipartiteRegularGraph, comp: &GrsCode, blocks: &[Vec<u32>]) -> Result<Vec<u32>, LtError> {
    if blocks.len() != g.n() {
        return Err(LtError::WrongLength {
            expected: g.n(),
            got: blocks.len(),
        });
    }
    let encoded: Vec<Vec<u32>> = blocks
        .par_iter()
        .map(|b| comp.encode_systematic(b))
        .collect::<Result<_, _>>()?;
    let mut z = vec![0u32; g.num_edges()];
    for (v, block) in encoded.into_iter().enumerate() {
        for (&e, x) in g.right_edges(v).iter().zip(block) {
            z[e as usize] = x;
        }
    }
    Ok(z)
}

pub fn lt_encode(code: &LtCode, eta: &[Vec<u32>]) -> Result<LtCodeword, LtError> {
    let g1 = code.stage1.graph();
    let c0 = code.stage1.c_prime();
    let c = spread(g1, code.stage1.c_double(), eta)?;
    let s: Vec<u32> = (0..code.n())
        .into_par_iter()
        .flat_map_iter(|u| c0.syndrome(&c[g1.left_edges(u)]))
        .collect();
    let w = code.mediator.encode(&s)?;
    let d = spread(&code.g2, &code.c2, &w)?;
    let x = (0..code.n())
        .map(|u| {
            let mut sym = c[g1.left_edges(u)].to_vec();
            sym.extend_from_slice(&d[code.g2.left_edges(u)]);
            sym
        })
        .collect();
    Ok(LtCodeword { x, c, s, w, d })
}

/// A received symbol; either half may be erased.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtReceived {
    pub first: Option<Vec<u32>>,
    pub second: Option<Vec<u32>>,
}

impl LtReceived {
    /// Splits a whole symbol, or erases both halves.
    pub fn from_symbol(code: &LtCode, sym: Option<&[u32]>) -> Self {
        match sym {
            Some(x) => {
                let (a, b) = x.split_at(code.design.delta1);
                LtReceived {
                    first: Some(a.to_vec()),
                    second: Some(b.to_vec()),
                }
            }
            None => LtReceived {
                first: None,
                second: None,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LtStage {
    Mediator,
    Coset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LtDecodeReport {
    pub eta: Option<Vec<Vec<u32>>>,
    pub failed_stage: Option<LtStage>,
    /// Mediator word recovered by the `C₂` round.
    pub w_tilde: Vec<Vec<u32>>,
    /// `C₂` blocks whose decoding failed (their symbol is set to zero).
    pub c2_failures: usize,
    pub s_hat: Option<Vec<u32>>,
    pub coset: Option<DecodeReport>,
}

pub fn lt_decode(code: &LtCode, y: &[LtReceived]) -> Result<LtDecodeReport, LtError> {
    let n = code.n();
    if y.len() != n {
        return Err(LtError::WrongLength {
            expected: n,
            got: y.len(),
        });
    }
    let (d1, d2) = (code.design.delta1, code.design.delta2);
    for r in y {
        let bad = |h: &Option<Vec<u32>>, len: usize| h.as_ref().is_some_and(|v| v.len() != len);
        if bad(&r.first, d1) || bad(&r.second, d2) {
            return Err(LtError::WrongLength {
                expected: d1 + d2,
                got: r.first.as_ref().map_or(0, Vec::len) + r.second.as_ref().map_or(0, Vec::len),
            });
        }
    }

    let g2 = &code.g2;
    let mut z: Vec<Option<u32>> = vec![None; g2.num_edges()];
    for (u, r) in y.iter().enumerate() {
        if let Some(half) = &r.second {
            for (e, &x) in g2.left_edges(u).zip(half) {
                z[e] = Some(x);
            }
        }
    }
    let k2 = code.c2.dim();
    let decoded: Vec<Option<Vec<u32>>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let word: Vec<Option<u32>> = g2.right_edges(v).iter().map(|&e| z[e as usize]).collect();
            code.c2.decode(&word).ok().map(|c| code.c2.systematic_part(&c).to_vec())
        })
        .collect();
    let c2_failures = decoded.iter().filter(|d| d.is_none()).count();
    let w_tilde: Vec<Vec<u32>> = decoded.into_iter().map(|d| d.unwrap_or_else(|| vec![0; k2])).collect();

    let Ok(s_hat) = code.mediator.decode(&w_tilde) else {
        return Ok(LtDecodeReport {
            eta: None,
            failed_stage: Some(LtStage::Mediator),
            w_tilde,
            c2_failures,
            s_hat: None,
            coset: None,
        });
    };

    let cosets: Vec<Vec<u32>> = s_hat.chunks(code.design.syndrome_len()).map(<[u32]>::to_vec).collect();
    let y1 = PhiWord {
        entries: y.iter().map(|r| r.first.clone()).collect(),
    };
    let report = decode_phi(&code.stage1, &y1, &code.constants.coset_params, Some(&cosets));
    let eta = report.codeword.as_ref().map(|c| {
        let g1 = code.stage1.graph();
        let c1 = code.stage1.c_double();
        (0..n)
            .map(|v| {
                let block: Vec<u32> = g1.right_edges(v).iter().map(|&e| c[e as usize]).collect();
                c1.systematic_part(&block).to_vec()
            })
            .collect()
    });
    Ok(LtDecodeReport {
        failed_stage: eta.is_none().then_some(LtStage::Coset),
        eta,
        w_tilde,
        c2_failures,
        s_hat: Some(s_hat),
        coset: Some(report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{random_vector, trial_rng};

    fn desk_config() -> LtConfig {
        LtConfig {
            n: 64,
            rate: Ratio::new(1, 2),
            epsilon: 0.3,
            kappa: Ratio::new(1, 2),
            mu: 1.0 / 16.0,
            seed: 5,
            mediator: MediatorChoice::Auto,
            gamma2_target: None,
            refine_steps: 0,
            simple: true,
        }
    }

    #[test]
    fn alpha_and_asymptotic_degree() {
        let d = lt_design(Ratio::new(1, 2), 0.1, Ratio::new(1, 4), 0.05, 64).unwrap();
        assert!((d.alpha_r - 40.0).abs() < 1e-12);
        assert!((d.asymptotic_delta1 - 40_000.0).abs() < 1e-6);
        assert!(d.relaxed);
        assert!(d.identity_holds());
    }

    #[test]
    fn relaxed_desk_design() {
        let d = lt_design(Ratio::new(1, 2), 0.3, Ratio::new(1, 2), 1.0 / 16.0, 64).unwrap();
        assert!(d.relaxed);
        assert_eq!((d.delta1, d.delta2, d.k0, d.q), (62, 36, 53, 67));
        assert!(d.identity_holds());
        assert!(d.theta0() >= d.theta0_target);
        assert_eq!(d.code_rate(), Ratio::new(31, 98));
        // Δ₂/Δ₁ < ε/R gives rate > R − ε
        assert!(ratio_f64(d.code_rate()) > 0.5 - 0.3);
    }

    #[test]
    fn asymptotic_design_when_it_fits() {
        // large ε keeps α_R/ε³ small
        let d = lt_design(Ratio::new(1, 2), 0.45, Ratio::new(1, 2), 1.0, 200).unwrap();
        assert!(!d.relaxed);
        assert!(d.delta1 as f64 >= d.asymptotic_delta1);
        assert!(d.identity_holds());
    }

    #[test]
    fn design_rejects_bad_inputs() {
        assert!(lt_design(Ratio::new(1, 2), 0.6, Ratio::new(1, 2), 0.1, 64).is_err());
        assert!(lt_design(Ratio::new(1, 2), 0.1, Ratio::new(1, 2), 0.0, 64).is_err());
        assert!(lt_design(Ratio::new(1, 2), 0.1, Ratio::new(1, 2), 0.1, 2).is_err());
    }

    #[test]
    fn mediator_round_trips_without_errors() {
        let f = PrimeField::new(11).unwrap();
        let m = MediatorCode::interleaved_grs(f, 8, 2, 16).unwrap();
        assert_eq!(m.max_errors(), 0);
        let mut rng = trial_rng(0, 0);
        let s = random_vector(&f, 16, &mut rng);
        assert_eq!(m.decode(&m.encode(&s).unwrap()).unwrap(), s);
    }

    #[test]
    fn encoder_is_linear_and_consistent() {
        let code = LtCode::build(&desk_config(), false).unwrap();
        let f = code.field();
        let mut rng = trial_rng(1, 0);
        let k1 = code.block_len();
        let a: Vec<Vec<u32>> = (0..code.n()).map(|_| random_vector(&f, k1, &mut rng)).collect();
        let b: Vec<Vec<u32>> = (0..code.n()).map(|_| random_vector(&f, k1, &mut rng)).collect();
        let sum: Vec<Vec<u32>> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| f.add(p, q)).collect())
            .collect();
        let (xa, xb, xs) = (
            lt_encode(&code, &a).unwrap(),
            lt_encode(&code, &b).unwrap(),
            lt_encode(&code, &sum).unwrap(),
        );
        for u in 0..code.n() {
            let expect: Vec<u32> = xa.x[u].iter().zip(&xb.x[u]).map(|(&p, &q)| f.add(p, q)).collect();
            assert_eq!(xs.x[u], expect);
        }
        let cosets: Vec<Vec<u32>> = xa.s.chunks(code.design.syndrome_len()).map(<[u32]>::to_vec).collect();
        assert!(code.stage1().membership_coset(&xa.c, &cosets));
        let zero = lt_encode(&code, &vec![vec![0; k1]; code.n()]).unwrap();
        assert!(zero.x.iter().all(|s| s.iter().all(|&x| x == 0)));
    }

    #[test]
    fn clean_word_decodes() {
        let code = LtCode::build(&desk_config(), false).unwrap();
        let f = code.field();
        let mut rng = trial_rng(2, 0);
        let eta: Vec<Vec<u32>> = (0..code.n())
            .map(|_| random_vector(&f, code.block_len(), &mut rng))
            .collect();
        let cw = lt_encode(&code, &eta).unwrap();
        let y: Vec<LtReceived> = cw.x.iter().map(|x| LtReceived::from_symbol(&code, Some(x))).collect();
        let rep = lt_decode(&code, &y).unwrap();
        assert_eq!(rep.w_tilde, cw.w);
        assert_eq!(rep.s_hat.as_ref(), Some(&cw.s));
        assert_eq!(rep.eta, Some(eta));
    }
}
