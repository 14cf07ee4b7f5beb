//! Graph codes `C = (G, C' : C'')` and their folding over `Φ = F^{k'}`.
//!
//! Coordinates live on the edges of a bipartite regular graph. A word is in
//! `C` when every `V'` sub-block is a codeword of `C'` and every `V''`
//! sub-block is a codeword of `C''`. The folded code reads each `V'`
//! sub-block as the single `Φ`-symbol that `C'` encodes systematically into
//! it, so `ψ` is a projection onto the first `k'` slots of every `E(u)`.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bigraph::{BipartiteRegularGraph, GraphSpec};
use crate::gf::PrimeField;
use crate::grs::{GrsCode, GrsParams};
use crate::linalg;

/// Largest code size `q^dim` that [`TannerCode::brute_min_phi_weight`]
/// enumerates.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TannerError {
    #[error("invalid code: {0}")]
    Invalid(String),
    #[error("expected length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("word is not a codeword")]
    NotCodeword,
    #[error("word has erasures")]
    Erased,
    #[error("q^dim = {q}^{dim} exceeds the enumeration limit")]
    TooLarge { q: u32, dim: usize },
}

/// A word over `Φ ∪ {?}` indexed by `V'`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiWord {
    pub entries: Vec<Option<Vec<u32>>>,
}

impl PhiWord {
    pub fn from_symbols(symbols: Vec<Vec<u32>>) -> Self {
        PhiWord {
            entries: symbols.into_iter().map(Some).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.entries.iter().filter(|e| e.is_none()).count()
    }

    /// Number of positions (erasures included) where the words differ.
    pub fn distance(&self, other: &PhiWord) -> usize {
        self.entries.iter().zip(&other.entries).filter(|(a, b)| a != b).count()
    }
}

/// A word over `F ∪ {?}` indexed by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWord {
    pub symbols: Vec<Option<u32>>,
}

impl EdgeWord {
    pub fn from_values(values: &[u32]) -> Self {
        EdgeWord {
            symbols: values.iter().map(|&x| Some(x)).collect(),
        }
    }

    /// The underlying values, or `None` if anything is erased.
    pub fn values(&self) -> Option<Vec<u32>> {
        self.symbols.iter().copied().collect()
    }

    pub fn left_block(&self, g: &BipartiteRegularGraph, u: usize) -> Vec<Option<u32>> {
        g.left_edges(u).map(|e| self.symbols[e]).collect()
    }

    pub fn right_block(&self, g: &BipartiteRegularGraph, v: usize) -> Vec<Option<u32>> {
        g.right_edges(v).iter().map(|&e| self.symbols[e as usize]).collect()
    }
}

/// Kernel of the `V''` constraints in the space of `V'` messages.
#[derive(Debug, Clone)]
struct Generator {
    /// Each vector holds `n * k'` message coordinates, block `u` first.
    basis: Vec<Vec<u32>>,
    /// Coordinate where basis vector `j` is one and every other basis
    /// vector is zero.
    free: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TannerSpec {
    pub graph: GraphSpec,
    pub c_prime: GrsParams,
    pub c_double: GrsParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "TannerSpec", into = "TannerSpec")]
pub struct TannerCode {
    graph: BipartiteRegularGraph,
    c_prime: GrsCode,
    c_double: GrsCode,
    generator: OnceLock<Generator>,
}

impl PartialEq for TannerCode {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.c_prime == other.c_prime && self.c_double == other.c_double
    }
}

impl TryFrom<TannerSpec> for TannerCode {
    type Error = TannerError;

    fn try_from(s: TannerSpec) -> Result<Self, Self::Error> {
        let bad = |e: &dyn std::fmt::Display| TannerError::Invalid(e.to_string());
        let graph = BipartiteRegularGraph::try_from(s.graph).map_err(|e| bad(&e))?;
        let c_prime = GrsCode::try_from(s.c_prime).map_err(|e| bad(&e))?;
        let c_double = GrsCode::try_from(s.c_double).map_err(|e| bad(&e))?;
        TannerCode::new(graph, c_prime, c_double)
    }
}

impl From<TannerCode> for TannerSpec {
    fn from(c: TannerCode) -> Self {
        TannerSpec {
            graph: c.graph.spec(),
            c_prime: c.c_prime.params(),
            c_double: c.c_double.params(),
        }
    }
}

impl TannerCode {
    pub fn new(graph: BipartiteRegularGraph, c_prime: GrsCode, c_double: GrsCode) -> Result<Self, TannerError> {
        let d = graph.degree();
        if c_prime.length() != d || c_double.length() != d {
            return Err(TannerError::Invalid(format!(
                "component lengths {} and {} differ from the degree {d}",
                c_prime.length(),
                c_double.length()
            )));
        }
        if c_prime.field() != c_double.field() {
            return Err(TannerError::Invalid("component codes over different fields".into()));
        }
        Ok(TannerCode {
            graph,
            c_prime,
            c_double,
            generator: OnceLock::new(),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.c_prime.field()
    }

    pub fn graph(&self) -> &BipartiteRegularGraph {
        &self.graph
    }

    pub fn c_prime(&self) -> &GrsCode {
        &self.c_prime
    }

    pub fn c_double(&self) -> &GrsCode {
        &self.c_double
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn degree(&self) -> usize {
        self.graph.degree()
    }

    /// Number of edges, the length of `C` over `F`.
    pub fn length(&self) -> usize {
        self.graph.num_edges()
    }

    /// Size of a `Φ`-symbol, `k'`.
    pub fn phi_width(&self) -> usize {
        self.c_prime.dim()
    }

    /// `d'/Δ`.
    pub fn theta(&self) -> f64 {
        self.c_prime.relative_distance()
    }

    /// `d''/Δ`.
    pub fn delta(&self) -> f64 {
        self.c_double.relative_distance()
    }

    pub fn spec(&self) -> TannerSpec {
        self.clone().into()
    }

    pub fn left_block(&self, z: &[u32], u: usize) -> Vec<u32> {
        z[self.graph.left_edges(u)].to_vec()
    }

    pub fn right_block(&self, z: &[u32], v: usize) -> Vec<u32> {
        self.graph.right_edges(v).iter().map(|&e| z[e as usize]).collect()
    }

    fn check_len(&self, z: &[u32]) -> Result<(), TannerError> {
        if z.len() != self.length() {
            return Err(TannerError::WrongLength {
                expected: self.length(),
                got: z.len(),
            });
        }
        Ok(())
    }

    /// Every `V''` sub-block is in `C''`.
    pub fn right_constraints_hold(&self, z: &[u32]) -> bool {
        (0..self.n())
            .into_par_iter()
            .all(|v| self.c_double.is_codeword(&self.right_block(z, v)))
    }

    pub fn membership(&self, z: &[u32]) -> bool {
        z.len() == self.length()
            && (0..self.n())
                .into_par_iter()
                .all(|u| self.c_prime.is_codeword(&z[self.graph.left_edges(u)]))
            && self.right_constraints_hold(z)
    }

    /// Membership in the coset code where the `V'` sub-block at `u` must
    /// have syndrome `cosets[u]` under `C'`.
    pub fn membership_coset(&self, z: &[u32], cosets: &[Vec<u32>]) -> bool {
        z.len() == self.length()
            && cosets.len() == self.n()
            && (0..self.n())
                .into_par_iter()
                .all(|u| self.c_prime.syndrome(&z[self.graph.left_edges(u)]) == cosets[u])
            && self.right_constraints_hold(z)
    }

    pub fn psi(&self, c: &[u32]) -> Result<PhiWord, TannerError> {
        self.check_len(c)?;
        if !self.membership(c) {
            return Err(TannerError::NotCodeword);
        }
        Ok(PhiWord::from_symbols(
            (0..self.n())
                .map(|u| self.c_prime.systematic_part(&c[self.graph.left_edges(u)]).to_vec())
                .collect(),
        ))
    }

    /// Re-encodes every `Φ`-symbol with `C'`, without checking `C''`.
    pub fn expand(&self, phi: &PhiWord) -> Result<Vec<u32>, TannerError> {
        if phi.len() != self.n() {
            return Err(TannerError::WrongLength {
                expected: self.n(),
                got: phi.len(),
            });
        }
        let mut z = Vec::with_capacity(self.length());
        for entry in &phi.entries {
            let sym = entry.as_ref().ok_or(TannerError::Erased)?;
            let block = self
                .c_prime
                .encode_systematic(sym)
                .map_err(|_| TannerError::WrongLength {
                    expected: self.phi_width(),
                    got: sym.len(),
                })?;
            z.extend(block);
        }
        Ok(z)
    }

    pub fn psi_inverse(&self, phi: &PhiWord) -> Result<Vec<u32>, TannerError> {
        let z = self.expand(phi)?;
        if !self.right_constraints_hold(&z) {
            return Err(TannerError::NotCodeword);
        }
        Ok(z)
    }

    fn generator(&self) -> &Generator {
        self.generator.get_or_init(|| {
            let f = self.field();
            let (n, k1) = (self.n(), self.phi_width());
            // edge value at slot s of E(u) is Σ_l G[l][s] m_{u,l}
            let gen: Vec<Vec<u32>> = (0..k1)
                .map(|l| {
                    let mut info = vec![0; k1];
                    info[l] = 1;
                    self.c_prime.encode_systematic(&info).expect("unit message")
                })
                .collect();
            let h = self.c_double.parity_check_matrix();
            let rows: Vec<Vec<u32>> = (0..n)
                .into_par_iter()
                .flat_map_iter(|v| {
                    let edges = self.graph.right_edges(v);
                    let gen = &gen;
                    h.iter().map(move |hrow| {
                        let mut row = vec![0u32; n * k1];
                        for (slot, &e) in edges.iter().enumerate() {
                            let u = self.graph.left_endpoint(e as usize);
                            for (l, g) in gen.iter().enumerate() {
                                let x = &mut row[u * k1 + l];
                                *x = f.mul_add(*x, hrow[slot], g[slot]);
                            }
                        }
                        row
                    })
                })
                .collect();
            if rows.is_empty() {
                return Generator {
                    basis: (0..n * k1)
                        .map(|j| (0..n * k1).map(|i| u32::from(i == j)).collect())
                        .collect(),
                    free: (0..n * k1).collect(),
                };
            }
            let red = linalg::rref(&f, rows, n * k1);
            Generator {
                basis: red.nullspace_basis(&f),
                free: red.free_columns(),
            }
        })
    }

    /// Dimension of `C` over `F` (computed once by elimination).
    pub fn dimension(&self) -> usize {
        self.generator().basis.len()
    }

    /// Linear, injective encoder `F^dim → C` through the nullspace basis.
    pub fn encode_generic(&self, msg: &[u32]) -> Result<Vec<u32>, TannerError> {
        let gen = self.generator();
        if msg.len() != gen.basis.len() {
            return Err(TannerError::WrongLength {
                expected: gen.basis.len(),
                got: msg.len(),
            });
        }
        let f = self.field();
        let mut m = vec![0u32; self.n() * self.phi_width()];
        for (&c, b) in msg.iter().zip(&gen.basis) {
            if c != 0 {
                f.axpy(&mut m, c, b);
            }
        }
        Ok(self.expand_messages(&m))
    }

    /// Inverse of [`Self::encode_generic`] on codewords.
    pub fn message_of(&self, c: &[u32]) -> Result<Vec<u32>, TannerError> {
        let phi = self.psi(c)?;
        let m: Vec<u32> = phi.entries.into_iter().flat_map(|e| e.expect("psi output")).collect();
        Ok(self.generator().free.iter().map(|&j| m[j]).collect())
    }

    fn expand_messages(&self, m: &[u32]) -> Vec<u32> {
        let k1 = self.phi_width();
        m.chunks(k1)
            .flat_map(|info| self.c_prime.encode_systematic(info).expect("block width"))
            .collect()
    }

    /// Encoder for `C' = F^Δ`: block `η_v` is the `C''` message at `v`.
    pub fn encode_rate1(&self, eta: &[Vec<u32>]) -> Result<Vec<u32>, TannerError> {
        if self.c_prime.dim() != self.degree() {
            return Err(TannerError::Invalid("C' is not the full space".into()));
        }
        if eta.len() != self.n() {
            return Err(TannerError::WrongLength {
                expected: self.n(),
                got: eta.len(),
            });
        }
        let mut z = vec![0u32; self.length()];
        for (v, msg) in eta.iter().enumerate() {
            let block = self
                .c_double
                .encode_systematic(msg)
                .map_err(|_| TannerError::WrongLength {
                    expected: self.c_double.dim(),
                    got: msg.len(),
                })?;
            for (&e, x) in self.graph.right_edges(v).iter().zip(block) {
                z[e as usize] = x;
            }
        }
        Ok(z)
    }

    /// Minimum number of nonzero `Φ`-symbols over all nonzero codewords,
    /// by enumerating every codeword.
    pub fn brute_min_phi_weight(&self) -> Result<usize, TannerError> {
        let q = self.field().modulus();
        let basis = &self.generator().basis;
        let dim = basis.len();
        let size = (0..dim).try_fold(1u64, |acc, _| {
            acc.checked_mul(q as u64).filter(|&s| s <= BRUTE_FORCE_LIMIT)
        });
        if size.is_none() {
            return Err(TannerError::TooLarge { q, dim });
        }
        if dim == 0 {
            return Ok(usize::MAX);
        }
        let f = self.field();
        let k1 = self.phi_width();
        let mut digits = vec![0u32; dim];
        let mut m = vec![0u32; self.n() * k1];
        let mut best = usize::MAX;
        // odometer: bumping digit j by one adds basis j; wrapping from q-1
        // to 0 adds it too since q * b = 0
        'outer: loop {
            let mut j = 0;
            loop {
                if j == dim {
                    break 'outer;
                }
                f.axpy(&mut m, 1, &basis[j]);
                digits[j] += 1;
                if digits[j] < q {
                    break;
                }
                digits[j] = 0;
                j += 1;
            }
            let w = m.chunks(k1).filter(|b| b.iter().any(|&x| x != 0)).count();
            best = best.min(w);
        }
        Ok(best)
    }
}

/// Lower bound `(δ − γ sqrt(δ/θ)) / (1 − γ)` on the relative distance of
/// the folded code. May be nonpositive.
pub fn min_dist_bound(theta: f64, delta: f64, gamma: f64) -> f64 {
    (delta - gamma * (delta / theta).sqrt()) / (1.0 - gamma)
}

/// Lower bound `(r + R − 1)/r` on the rate of the folded code.
pub fn rate_bound_phi(r: f64, big_r: f64) -> f64 {
    1.0 - 1.0 / r + big_r / r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraph::gamma;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k33_code() -> TannerCode {
        let f = PrimeField::new(7).unwrap();
        let c = GrsCode::standard(f, 3, 2).unwrap();
        TannerCode::new(BipartiteRegularGraph::complete(3).unwrap(), c.clone(), c).unwrap()
    }

    fn random_message(code: &TannerCode, rng: &mut ChaCha8Rng) -> Vec<u32> {
        (0..code.dimension()).map(|_| code.field().random(rng)).collect()
    }

    #[test]
    fn k33_dimension_and_weight() {
        let code = k33_code();
        // rate bound 1/3 of length 9
        assert!(code.dimension() >= 3);
        let w = code.brute_min_phi_weight().unwrap();
        let gam = gamma(code.graph()).unwrap().gamma;
        let bound = (3.0 * min_dist_bound(2.0 / 3.0, 2.0 / 3.0, gam) - 1e-9).ceil() as usize;
        assert_eq!(bound, 2);
        assert!(w >= bound, "{w}");
    }

    #[test]
    fn k33_round_trips() {
        let code = k33_code();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zero = vec![0; code.dimension()];
        let z = code.encode_generic(&zero).unwrap();
        assert!(z.iter().all(|&x| x == 0));
        assert!(code
            .psi(&z)
            .unwrap()
            .entries
            .iter()
            .all(|e| e.as_ref().unwrap().iter().all(|&x| x == 0)));
        for _ in 0..100 {
            let c = code.encode_generic(&random_message(&code, &mut rng)).unwrap();
            assert!(code.membership(&c));
            let phi = code.psi(&c).unwrap();
            assert_eq!(code.psi_inverse(&phi).unwrap(), c);
            let msg = code.message_of(&c).unwrap();
            assert_eq!(code.encode_generic(&msg).unwrap(), c);
        }
    }

    #[test]
    fn single_corruption_breaks_membership() {
        let code = k33_code();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = code.encode_generic(&random_message(&code, &mut rng)).unwrap();
        for e in 0..code.length() {
            for delta in 1..7 {
                let mut z = c.clone();
                z[e] = code.field().add(z[e], delta);
                assert!(!code.membership(&z));
                assert_eq!(code.psi(&z), Err(TannerError::NotCodeword));
            }
        }
    }

    #[test]
    fn repetition_on_cycle_is_constant() {
        let f = PrimeField::new(5).unwrap();
        let rep = GrsCode::standard(f, 2, 1).unwrap();
        let code = TannerCode::new(BipartiteRegularGraph::cycle(4).unwrap(), rep.clone(), rep).unwrap();
        assert_eq!(code.dimension(), 1);
        assert_eq!(code.brute_min_phi_weight().unwrap(), 4);
        let c = code.encode_generic(&[3]).unwrap();
        let first = c[0];
        assert!(first != 0 && c.iter().all(|&x| x == first));
    }

    #[test]
    fn full_space_right_code_weight() {
        let f = PrimeField::new(5).unwrap();
        let c1 = GrsCode::standard(f, 3, 2).unwrap();
        let full = GrsCode::standard(f, 3, 3).unwrap();
        let code = TannerCode::new(BipartiteRegularGraph::complete(3).unwrap(), c1, full).unwrap();
        assert_eq!(code.dimension(), 6);
        assert_eq!(code.brute_min_phi_weight().unwrap(), 1);
    }

    #[test]
    fn rate1_encoder_on_cycle() {
        let f = PrimeField::new(5).unwrap();
        let full = GrsCode::standard(f, 2, 2).unwrap();
        let rep = GrsCode::standard(f, 2, 1).unwrap();
        let g = BipartiteRegularGraph::cycle(4).unwrap();
        let code = TannerCode::new(g.clone(), full, rep).unwrap();
        let eta: Vec<Vec<u32>> = (0..4).map(|v| vec![v as u32 + 1]).collect();
        let z = code.encode_rate1(&eta).unwrap();
        assert!(code.membership(&z));
        for v in 0..4 {
            assert_eq!(code.right_block(&z, v), vec![v as u32 + 1; 2]);
        }
        let zero = code.encode_rate1(&vec![vec![0]; 4]).unwrap();
        assert!(zero.iter().all(|&x| x == 0));
        assert!(code.encode_rate1(&vec![vec![0, 0]; 4]).is_err());
        assert!(k33_code().encode_rate1(&vec![vec![0, 0]; 3]).is_err());
    }

    #[test]
    fn rate1_psi_reblocks() {
        let f = PrimeField::new(7).unwrap();
        let full = GrsCode::standard(f, 3, 3).unwrap();
        let c2 = GrsCode::standard(f, 3, 2).unwrap();
        let code = TannerCode::new(BipartiteRegularGraph::complete(3).unwrap(), full, c2).unwrap();
        let z = code.encode_rate1(&[vec![1, 2], vec![3, 4], vec![5, 6]]).unwrap();
        let phi = code.psi(&z).unwrap();
        for u in 0..3 {
            assert_eq!(phi.entries[u].as_deref(), Some(&z[3 * u..3 * u + 3]));
        }
    }

    #[test]
    fn rate_and_distance_formulas() {
        assert_eq!(min_dist_bound(0.7, 0.4, 0.0), 0.4);
        assert!((min_dist_bound(0.5, 0.5, 0.125) - 3.0 / 7.0).abs() < 1e-12);
        assert!(min_dist_bound(0.01, 0.5, 0.5) < 0.0);
        for eps in [0.05, 0.1, 0.2] {
            let g: f64 = 0.9 * f64::powf(eps, 1.5);
            assert!(min_dist_bound(eps, 0.6, g) > 0.6 - eps);
            assert!(rate_bound_phi(1.0 - eps, 0.5) > 0.5 - eps);
        }
        assert_eq!(rate_bound_phi(1.0, 0.3), 0.3);
        assert!((rate_bound_phi(0.8, 0.5) - 0.375).abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_components() {
        let f = PrimeField::new(7).unwrap();
        let g = BipartiteRegularGraph::complete(3).unwrap();
        let c3 = GrsCode::standard(f, 3, 2).unwrap();
        let c4 = GrsCode::standard(f, 4, 2).unwrap();
        assert!(TannerCode::new(g.clone(), c3.clone(), c4).is_err());
        let other = GrsCode::standard(PrimeField::new(11).unwrap(), 3, 2).unwrap();
        assert!(TannerCode::new(g, c3, other).is_err());
        let code = k33_code();
        assert!(code.encode_generic(&[1]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let code = k33_code();
        let json = serde_json::to_string(&code).unwrap();
        let back: TannerCode = serde_json::from_str(&json).unwrap();
        assert_eq!(back, code);
        assert_eq!(back.dimension(), code.dimension());
    }
}
