//! Bipartite Δ-regular graphs in the permutation model.
//!
//! A graph is the union of Δ perfect matchings between `V'` and `V''`, both
//! identified with `0..n`. Edge `(u, i)` joins `u ∈ V'` to `matchings[i][u]`
//! and has id `u * Δ + i`. Because every matching touches each vertex of
//! `V''` exactly once, slot `i` of `E(v)` is also the edge contributed by
//! matching `i`; the same slot index therefore addresses an edge from both
//! of its endpoints. All incidence tables are precomputed at construction.
//!
//! The module also measures the spectral ratio γ (second singular value of
//! the biadjacency matrix over Δ) and carries the exhaustive checkers for
//! the mixing and expansion inequalities that the code bounds rest on.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute slack used by the inequality checkers.
pub const CHECK_SLACK: f64 = 1e-9;

/// Graphs with at most this many vertices per side use a dense eigensolver.
pub const DENSE_EIGEN_LIMIT: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("no connected graph found after {attempts} samples")]
    Disconnected { attempts: usize },
    #[error("spectral target γ ≤ {target} not reached; best measured γ = {best}")]
    GammaUnreachable { target: f64, best: f64 },
    #[error("power iteration did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
    #[error("function value {0} outside [0, 1]")]
    ChiOutOfRange(f64),
    #[error("the expansion inequality needs γ > 0")]
    ZeroGamma,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub n: usize,
    pub delta: usize,
    pub matchings: Vec<Vec<u32>>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct BipartiteRegularGraph {
    n: usize,
    degree: usize,
    matchings: Vec<Vec<u32>>,
    seed: Option<u64>,
    /// `right_edges[v * Δ + i]` is the edge in slot `i` of `E(v)`.
    right_edges: Vec<u32>,
}

impl PartialEq for BipartiteRegularGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.matchings == other.matchings
    }
}

impl TryFrom<GraphSpec> for BipartiteRegularGraph {
    type Error = GraphError;

    fn try_from(s: GraphSpec) -> Result<Self, Self::Error> {
        if s.matchings.len() != s.delta {
            return Err(GraphError::Invalid(format!(
                "{} matchings for degree {}",
                s.matchings.len(),
                s.delta
            )));
        }
        BipartiteRegularGraph::from_matchings(s.n, s.matchings, s.seed)
    }
}

impl From<BipartiteRegularGraph> for GraphSpec {
    fn from(g: BipartiteRegularGraph) -> Self {
        GraphSpec {
            n: g.n,
            delta: g.degree,
            matchings: g.matchings,
            seed: g.seed,
        }
    }
}

impl BipartiteRegularGraph {
    pub fn from_matchings(n: usize, matchings: Vec<Vec<u32>>, seed: Option<u64>) -> Result<Self, GraphError> {
        if n < 2 {
            return Err(GraphError::Invalid(format!("need n > 1, got {n}")));
        }
        if matchings.is_empty() {
            return Err(GraphError::Invalid("degree must be at least 1".into()));
        }
        let degree = matchings.len();
        let mut right_edges = vec![0u32; n * degree];
        for (i, m) in matchings.iter().enumerate() {
            if m.len() != n {
                return Err(GraphError::Invalid(format!("matching {i} has length {}", m.len())));
            }
            let mut hit = vec![false; n];
            for (u, &v) in m.iter().enumerate() {
                let v = v as usize;
                if v >= n || std::mem::replace(&mut hit[v], true) {
                    return Err(GraphError::Invalid(format!("matching {i} is not a permutation")));
                }
                right_edges[v * degree + i] = (u * degree + i) as u32;
            }
        }
        Ok(BipartiteRegularGraph {
            n,
            degree,
            matchings,
            seed,
            right_edges,
        })
    }

    /// `K_{n,n}` as the union of the `n` cyclic shifts.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let shifts = (0..n).map(|s| (0..n).map(|u| ((u + s) % n) as u32).collect()).collect();
        Self::from_matchings(n, shifts, None)
    }

    /// The cycle of length `2n` as a 2-regular bipartite graph:
    /// `u` is adjacent to `u` and `u + 1 (mod n)`.
    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        Self::from_matchings(
            n,
            vec![(0..n as u32).collect(), (0..n).map(|u| ((u + 1) % n) as u32).collect()],
            None,
        )
    }

    /// Vertices per side.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_edges(&self) -> usize {
        self.n * self.degree
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn matchings(&self) -> &[Vec<u32>] {
        &self.matchings
    }

    pub fn spec(&self) -> GraphSpec {
        self.clone().into()
    }

    /// Edge ids of `E(u)`, `u ∈ V'`, in slot order.
    pub fn left_edges(&self, u: usize) -> std::ops::Range<usize> {
        u * self.degree..(u + 1) * self.degree
    }

    /// Edge ids of `E(v)`, `v ∈ V''`, in slot order.
    pub fn right_edges(&self, v: usize) -> &[u32] {
        &self.right_edges[v * self.degree..(v + 1) * self.degree]
    }

    pub fn left_endpoint(&self, e: usize) -> usize {
        e / self.degree
    }

    pub fn right_endpoint(&self, e: usize) -> usize {
        self.matchings[e % self.degree][e / self.degree] as usize
    }

    /// Position of edge `e` within `E(u)` and within `E(v)` (they agree).
    pub fn slot(&self, e: usize) -> usize {
        e % self.degree
    }

    pub fn left_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.matchings.iter().map(move |m| m[u] as usize)
    }

    pub fn right_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.right_edges(v).iter().map(move |&e| e as usize / self.degree)
    }

    /// No two matchings share an edge.
    pub fn is_simple(&self) -> bool {
        let mut seen = vec![false; self.n * self.n];
        for m in &self.matchings {
            for (u, &v) in m.iter().enumerate() {
                if std::mem::replace(&mut seen[u * self.n + v as usize], true) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_connected(&self) -> bool {
        // vertices 0..n are V', n..2n are V''
        let mut seen = vec![false; 2 * self.n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            let nbrs: Vec<usize> = if x < self.n {
                self.left_neighbors(x).map(|v| v + self.n).collect()
            } else {
                self.right_neighbors(x - self.n).collect()
            };
            for y in nbrs {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == 2 * self.n
    }

    /// Biadjacency matrix `X` (rows `V'`, columns `V''`, entries count
    /// parallel edges).
    pub fn biadjacency(&self) -> DMatrix<f64> {
        let mut x = DMatrix::zeros(self.n, self.n);
        for m in &self.matchings {
            for (u, &v) in m.iter().enumerate() {
                x[(u, v as usize)] += 1.0;
            }
        }
        x
    }

    /// `X^T X` (indexed by `V''`).
    pub fn gram(&self) -> DMatrix<f64> {
        let x = self.biadjacency();
        x.transpose() * x
    }

    /// `y = X^T X w` without forming the matrix.
    fn gram_apply(&self, w: &[f64], out: &mut [f64]) {
        let mut xw = vec![0.0; self.n];
        for m in &self.matchings {
            for (u, &v) in m.iter().enumerate() {
                xw[u] += w[v as usize];
            }
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        for m in &self.matchings {
            for (u, &v) in m.iter().enumerate() {
                out[v as usize] += xw[u];
            }
        }
    }
}

/// Sampling controls for [`random_regular_bipartite`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphOptions {
    /// Reject parallel edges. Ignored (forced) when `Δ = n`.
    pub simple: bool,
    /// Accept only graphs with measured γ at most this value.
    pub gamma_target: Option<f64>,
    pub max_resamples: usize,
    /// Budget of improving switch moves tried per sample when a target is
    /// set and the raw sample misses it.
    pub refine_steps: usize,
}

impl Default for GraphOptions {
    fn default() -> Self {
        GraphOptions {
            simple: true,
            gamma_target: None,
            max_resamples: 50,
            refine_steps: 0,
        }
    }
}

/// Samples a connected Δ-regular bipartite graph, deterministically in
/// `seed`.
///
/// Each matching is drawn uniformly at random (multigraph mode) or as a
/// randomized perfect matching of the not-yet-used vertex pairs (simple
/// mode). Disconnected samples are redrawn. With a γ target, samples that
/// miss it may be improved by a walk of accepted switches: swapping the
/// images of two vertices inside one matching keeps every matching a
/// permutation, and a switch is kept only when it lowers γ.
pub fn random_regular_bipartite(
    n: usize,
    degree: usize,
    seed: u64,
    opts: &GraphOptions,
) -> Result<BipartiteRegularGraph, GraphError> {
    if n < 2 || degree == 0 || degree > n {
        return Err(GraphError::Invalid(format!(
            "need 1 <= Δ <= n and n > 1 (n = {n}, Δ = {degree})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut connected_seen = false;
    for _ in 0..opts.max_resamples.max(1) {
        let matchings = if opts.simple || degree == n {
            sample_simple(n, degree, &mut rng)
        } else {
            (0..degree)
                .map(|_| {
                    let mut p: Vec<u32> = (0..n as u32).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect()
        };
        let mut g = BipartiteRegularGraph::from_matchings(n, matchings, Some(seed))?;
        if !g.is_connected() {
            continue;
        }
        connected_seen = true;
        let Some(target) = opts.gamma_target else {
            return Ok(g);
        };
        let mut gam = gamma(&g)?.gamma;
        if gam > target && opts.refine_steps > 0 && n <= DENSE_EIGEN_LIMIT {
            gam = refine_switches(&mut g, target, opts.refine_steps, opts.simple, &mut rng);
        }
        if gam <= target {
            return Ok(g);
        }
        best = best.min(gam);
    }
    if !connected_seen {
        return Err(GraphError::Disconnected {
            attempts: opts.max_resamples.max(1),
        });
    }
    Err(GraphError::GammaUnreachable {
        target: opts.gamma_target.unwrap_or(0.0),
        best,
    })
}

/// Δ edge-disjoint perfect matchings, each a randomized maximum matching
/// (augmenting paths in random order) of the pairs still unused.
fn sample_simple(n: usize, degree: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let mut used = vec![false; n * n];
    let mut out = Vec::with_capacity(degree);
    for _ in 0..degree {
        let mut avail: Vec<Vec<u32>> = (0..n)
            .map(|u| (0..n as u32).filter(|&v| !used[u * n + v as usize]).collect())
            .collect();
        for a in avail.iter_mut() {
            a.shuffle(rng);
        }
        let mut owner = vec![u32::MAX; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for &u in &order {
            let mut visited = vec![false; n];
            // the complement of a regular bipartite graph is regular, so a
            // perfect matching always exists
            let found = augment(u, &avail, &mut owner, &mut visited);
            assert!(found, "regular bipartite graph without a perfect matching");
        }
        let mut perm = vec![0u32; n];
        for (v, &u) in owner.iter().enumerate() {
            perm[u as usize] = v as u32;
            used[u as usize * n + v] = true;
        }
        out.push(perm);
    }
    out
}

fn augment(u: usize, avail: &[Vec<u32>], owner: &mut [u32], visited: &mut [bool]) -> bool {
    for &v in &avail[u] {
        let v = v as usize;
        if visited[v] {
            continue;
        }
        visited[v] = true;
        if owner[v] == u32::MAX || augment(owner[v] as usize, avail, owner, visited) {
            owner[v] = u as u32;
            return true;
        }
    }
    false
}

/// Greedy switch walk lowering the second eigenvalue of `X^T X`.
///
/// Candidate switches are scored by their first-order effect on the
/// Rayleigh quotients of the current top nontrivial eigenvectors; the best
/// of a small random batch is evaluated exactly and kept if γ drops.
fn refine_switches(
    g: &mut BipartiteRegularGraph,
    target: f64,
    steps: usize,
    simple: bool,
    rng: &mut ChaCha8Rng,
) -> f64 {
    const BATCH: usize = 48;
    const TRACKED: usize = 4;
    let n = g.n;
    let deg = g.degree;
    let mut adj = vec![0u16; n * n];
    for m in &g.matchings {
        for (u, &v) in m.iter().enumerate() {
            adj[u * n + v as usize] += 1;
        }
    }
    let mut gram = g.gram();
    let (mut lam2, mut vecs) = top_nontrivial(&gram, TRACKED);
    let mut gam = lam2.max(0.0).sqrt() / deg as f64;
    for _ in 0..steps {
        if gam <= target {
            break;
        }
        // X w for each tracked eigenvector
        let xw: Vec<Vec<f64>> = vecs
            .iter()
            .map(|w| {
                (0..n)
                    .map(|u| g.matchings.iter().map(|m| w[m[u] as usize]).sum())
                    .collect()
            })
            .collect();
        let mut pick: Option<(f64, usize, usize, usize)> = None;
        for _ in 0..BATCH {
            let i = rng.gen_range(0..deg);
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a == b {
                continue;
            }
            let (va, vb) = (g.matchings[i][a] as usize, g.matchings[i][b] as usize);
            if simple && (adj[a * n + vb] > 0 || adj[b * n + va] > 0) {
                continue;
            }
            let score: f64 = vecs
                .iter()
                .zip(&xw)
                .map(|(w, xw)| {
                    let dw = w[vb] - w[va];
                    2.0 * dw * (xw[a] - xw[b]) + 2.0 * dw * dw
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if pick.is_none_or(|p| score < p.0) {
                pick = Some((score, i, a, b));
            }
        }
        let Some((_, i, a, b)) = pick else { continue };
        apply_switch(g, &mut adj, &mut gram, i, a, b);
        let (l2, v2) = top_nontrivial(&gram, TRACKED);
        if l2 < lam2 - 1e-12 {
            lam2 = l2;
            vecs = v2;
            gam = lam2.max(0.0).sqrt() / deg as f64;
        } else {
            apply_switch(g, &mut adj, &mut gram, i, a, b);
        }
    }
    g.right_edges = BipartiteRegularGraph::from_matchings(n, g.matchings.clone(), g.seed)
        .expect("switches keep permutations")
        .right_edges;
    gam
}

fn apply_switch(g: &mut BipartiteRegularGraph, adj: &mut [u16], gram: &mut DMatrix<f64>, i: usize, a: usize, b: usize) {
    let n = g.n;
    let row =
        |g: &BipartiteRegularGraph, u: usize| -> Vec<usize> { g.matchings.iter().map(|m| m[u] as usize).collect() };
    let sub = |gram: &mut DMatrix<f64>, r: &[usize], s: f64| {
        for &x in r {
            for &y in r {
                gram[(x, y)] += s;
            }
        }
    };
    let (ra, rb) = (row(g, a), row(g, b));
    sub(gram, &ra, -1.0);
    sub(gram, &rb, -1.0);
    let (va, vb) = (g.matchings[i][a], g.matchings[i][b]);
    adj[a * n + va as usize] -= 1;
    adj[b * n + vb as usize] -= 1;
    adj[a * n + vb as usize] += 1;
    adj[b * n + va as usize] += 1;
    g.matchings[i][a] = vb;
    g.matchings[i][b] = va;
    let (ra, rb) = (row(g, a), row(g, b));
    sub(gram, &ra, 1.0);
    sub(gram, &rb, 1.0);
}

/// Largest eigenvalue of `gram` on the complement of the all-ones vector,
/// plus up to `k` leading eigenvectors of that complement.
fn top_nontrivial(gram: &DMatrix<f64>, k: usize) -> (f64, Vec<Vec<f64>>) {
    let n = gram.nrows();
    let eig = gram.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    // the top eigenvector is the all-ones direction for a connected regular
    // graph; skip it
    let rest = &idx[1..];
    let lam2 = eig.eigenvalues[rest[0]];
    let vecs = rest
        .iter()
        .take(k)
        .map(|&j| eig.eigenvectors.column(j).iter().copied().collect())
        .collect();
    (lam2, vecs)
}

/// Spectral data of `X^T X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    /// Largest eigenvalue; Δ² for every Δ-regular graph.
    pub lambda1: f64,
    /// Largest eigenvalue on the complement of the all-ones vector.
    pub lambda2: f64,
    /// `sqrt(lambda2) / Δ`.
    pub gamma: f64,
    /// `2 sqrt(Δ - 1) / Δ`.
    pub ramanujan_bound: f64,
}

impl SpectralProfile {
    pub fn is_ramanujan(&self) -> bool {
        self.gamma <= self.ramanujan_bound + 1e-12
    }
}

/// Measures γ. Dense symmetric eigensolver up to [`DENSE_EIGEN_LIMIT`]
/// vertices per side, deflated power iteration above.
pub fn gamma(g: &BipartiteRegularGraph) -> Result<SpectralProfile, GraphError> {
    let d = g.degree as f64;
    let ramanujan_bound = 2.0 * (d - 1.0).max(0.0).sqrt() / d;
    let (lambda1, lambda2) = if g.n <= DENSE_EIGEN_LIMIT {
        let eig = g.gram().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        (vals[0], vals[1].max(0.0))
    } else {
        (d * d, deflated_power_iteration(g)?)
    };
    Ok(SpectralProfile {
        lambda1,
        lambda2,
        gamma: lambda2.sqrt() / d,
        ramanujan_bound,
    })
}

fn deflated_power_iteration(g: &BipartiteRegularGraph) -> Result<f64, GraphError> {
    const MAX_ITERS: usize = 20_000;
    const TOL: f64 = 1e-7;
    let n = g.n;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    project(&mut v);
    let mut w = vec![0.0; n];
    let mut last = 0.0;
    let mut residual = f64::INFINITY;
    for it in 0..MAX_ITERS {
        g.gram_apply(&v, &mut w);
        let lam: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        residual = v.iter().zip(&w).map(|(a, b)| (b - lam * a).powi(2)).sum::<f64>().sqrt();
        if it > 10 && (lam - last).abs() <= TOL * lam.abs().max(1.0) {
            return Ok(lam.max(0.0));
        }
        last = lam;
        std::mem::swap(&mut v, &mut w);
        project(&mut v);
    }
    Err(GraphError::NoConvergence { residual })
}

/// Residual of the top eigenpair claim `X^T X 1 = Δ² 1`, and the gap
/// between the dense solver's top eigenvalue and Δ² (relative).
pub fn top_eigen_residual(g: &BipartiteRegularGraph) -> f64 {
    let d2 = (g.degree * g.degree) as f64;
    let ones = vec![1.0; g.n];
    let mut out = vec![0.0; g.n];
    g.gram_apply(&ones, &mut out);
    let vec_res = out.iter().map(|x| (x - d2).abs()).fold(0.0, f64::max) / d2;
    if g.n <= DENSE_EIGEN_LIMIT {
        let top = g
            .gram()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        vec_res.max((top - d2).abs() / d2)
    } else {
        vec_res
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingCheck {
    pub lhs: f64,
    pub sigma: f64,
    pub tau: f64,
    pub bound1: f64,
    pub bound2: f64,
}

impl MixingCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.bound1 + CHECK_SLACK && self.bound1 <= self.bound2 + CHECK_SLACK
    }
}

fn check_range(chi: &[f64]) -> Result<(), GraphError> {
    match chi.iter().find(|&&x| !(0.0..=1.0).contains(&x)) {
        Some(&x) => Err(GraphError::ChiOutOfRange(x)),
        None => Ok(()),
    }
}

fn sides_len(g: &BipartiteRegularGraph, left: &[f64], right: &[f64]) -> Result<(), GraphError> {
    if left.len() != g.n || right.len() != g.n {
        return Err(GraphError::Invalid("function must be defined on every vertex".into()));
    }
    Ok(())
}

/// Evaluates both sides of the mixing inequality for `χ` given on `V'`
/// (`left`) and `V''` (`right`).
pub fn check_mixing_lemma(
    g: &BipartiteRegularGraph,
    gamma: f64,
    left: &[f64],
    right: &[f64],
) -> Result<MixingCheck, GraphError> {
    sides_len(g, left, right)?;
    check_range(left)?;
    check_range(right)?;
    let n = g.n as f64;
    let mut sum = 0.0;
    for m in &g.matchings {
        for (u, &v) in m.iter().enumerate() {
            sum += left[u] * right[v as usize];
        }
    }
    let lhs = sum / (g.degree as f64 * n);
    let sigma = left.iter().sum::<f64>() / n;
    let tau = right.iter().sum::<f64>() / n;
    let bound1 = sigma * tau + gamma * (sigma * (1.0 - sigma) * tau * (1.0 - tau)).max(0.0).sqrt();
    let bound2 = (1.0 - gamma) * sigma * tau + gamma * (sigma * tau).sqrt();
    Ok(MixingCheck {
        lhs,
        sigma,
        tau,
        bound1,
        bound2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeSumCheck {
    pub degree_sum: usize,
    pub bound: f64,
}

impl DegreeSumCheck {
    pub fn holds(&self) -> bool {
        self.degree_sum as f64 <= self.bound + CHECK_SLACK
    }
}

/// Sum of degrees in the subgraph induced by `S ∪ T` against its bound.
pub fn check_degree_sum(g: &BipartiteRegularGraph, gamma: f64, s: &[bool], t: &[bool]) -> DegreeSumCheck {
    let mut edges = 0usize;
    for m in &g.matchings {
        for (u, &v) in m.iter().enumerate() {
            if s[u] && t[v as usize] {
                edges += 1;
            }
        }
    }
    let n = g.n as f64;
    let sigma = s.iter().filter(|&&x| x).count() as f64 / n;
    let tau = t.iter().filter(|&&x| x).count() as f64 / n;
    let bound = 2.0 * ((1.0 - gamma) * sigma * tau + gamma * (sigma * tau).sqrt()) * g.degree as f64 * n;
    DegreeSumCheck {
        degree_sum: 2 * edges,
        bound,
    }
}

/// Counts from checking the mixing inequality on every `χ` with values in
/// `{0, ½, 1}` and the degree-sum bound on every pair of vertex subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub mixing_cases: usize,
    pub mixing_failures: usize,
    pub degree_cases: usize,
    pub degree_failures: usize,
}

impl SweepReport {
    pub fn holds(&self) -> bool {
        self.mixing_failures == 0 && self.degree_failures == 0
    }
}

/// Largest `n` accepted by [`exhaustive_sweep`] (`3^{2n}` functions).
pub const SWEEP_LIMIT: usize = 5;

pub fn exhaustive_sweep(g: &BipartiteRegularGraph, gamma: f64) -> Result<SweepReport, GraphError> {
    let n = g.n;
    if n > SWEEP_LIMIT {
        return Err(GraphError::Invalid(format!("exhaustive sweep needs n ≤ {SWEEP_LIMIT}")));
    }
    let mut report = SweepReport {
        mixing_cases: 0,
        mixing_failures: 0,
        degree_cases: 0,
        degree_failures: 0,
    };
    let mut chi = vec![0.0; 2 * n];
    for mut code in 0..3usize.pow(2 * n as u32) {
        for x in chi.iter_mut() {
            *x = (code % 3) as f64 / 2.0;
            code /= 3;
        }
        report.mixing_cases += 1;
        if !check_mixing_lemma(g, gamma, &chi[..n], &chi[n..])?.holds() {
            report.mixing_failures += 1;
        }
    }
    for sm in 0u32..1 << n {
        let s: Vec<bool> = (0..n).map(|i| sm >> i & 1 == 1).collect();
        for tm in 0u32..1 << n {
            let t: Vec<bool> = (0..n).map(|i| tm >> i & 1 == 1).collect();
            report.degree_cases += 1;
            if !check_degree_sum(g, gamma, &s, &t).holds() {
                report.degree_failures += 1;
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpansionCheck {
    pub sqrt_ratio: f64,
    pub bound: f64,
}

impl ExpansionCheck {
    pub fn holds(&self) -> bool {
        self.sqrt_ratio + CHECK_SLACK >= self.bound
    }
}

/// Checks `sqrt(σ/τ) ≥ ((δ/2) − (1−γ)σ)/γ` for a `χ` meeting the
/// neighbourhood-weight hypothesis. Returns `Ok(None)` when `χ` vanishes on
/// `V''` or violates the hypothesis (nothing to check).
pub fn check_expansion_lemma(
    g: &BipartiteRegularGraph,
    gamma: f64,
    left: &[f64],
    right: &[f64],
    delta: f64,
) -> Result<Option<ExpansionCheck>, GraphError> {
    if gamma <= 0.0 {
        return Err(GraphError::ZeroGamma);
    }
    sides_len(g, left, right)?;
    check_range(left)?;
    check_range(right)?;
    if right.iter().all(|&x| x == 0.0) {
        return Ok(None);
    }
    let need = delta * g.degree as f64 / 2.0;
    for v in 0..g.n {
        if right[v] > 0.0 {
            let weight: f64 = g.right_neighbors(v).map(|u| left[u]).sum();
            if weight + CHECK_SLACK < need {
                return Ok(None);
            }
        }
    }
    let n = g.n as f64;
    let sigma = left.iter().sum::<f64>() / n;
    let tau = right.iter().sum::<f64>() / n;
    Ok(Some(ExpansionCheck {
        sqrt_ratio: (sigma / tau).sqrt(),
        bound: (delta / 2.0 - (1.0 - gamma) * sigma) / gamma,
    }))
}
