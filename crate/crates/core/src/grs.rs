//! Generalized Reed–Solomon codes with bounded-distance error-erasure
//! decoding and coset decoding.
//!
//! A codeword of the `[n, k]` code with evaluation points `a_i` and column
//! multipliers `v_i` is `(v_i * p(a_i))_i` for a polynomial `p` of degree
//! below `k`. The canonical parity-check matrix is the alternant matrix
//! `H[j][i] = h_i * a_i^j`, `j < n - k`, where `h_i` are the multipliers of
//! the dual code. Decoding computes syndromes against that matrix, runs
//! Berlekamp–Massey seeded with the erasure locator, finds the error
//! locations by evaluating the locator at every `a_i^{-1}` and recovers the
//! values with Forney's formula.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::PrimeField;
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrsError {
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
    #[error("expected a vector of length {expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
}

/// Returned when a word lies outside the decoding radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("bounded-distance decoding failed")]
pub struct DecodeFailure;

/// Serialized form of a [`GrsCode`]; the derived tables are rebuilt on load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrsParams {
    pub q: u32,
    pub length: usize,
    pub dim: usize,
    pub eval_points: Vec<u32>,
    pub col_mults: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GrsParams", into = "GrsParams")]
pub struct GrsCode {
    field: PrimeField,
    length: usize,
    dim: usize,
    points: Vec<u32>,
    col_mults: Vec<u32>,
    // derived
    point_invs: Vec<u32>,
    dual_mults: Vec<u32>,
    /// `sys_parity[i][j]`: contribution of information symbol `i` to parity
    /// position `dim + j` under systematic encoding.
    sys_parity: Vec<Vec<u32>>,
    /// Inverse of the last `n - k` columns of the parity-check matrix; maps a
    /// syndrome to a coset representative supported on those positions.
    coset_lift: Vec<Vec<u32>>,
}

impl TryFrom<GrsParams> for GrsCode {
    type Error = GrsError;

    fn try_from(p: GrsParams) -> Result<Self, Self::Error> {
        let field = PrimeField::new(p.q).map_err(|e| GrsError::InvalidParameters(e.to_string()))?;
        if p.eval_points.len() != p.length {
            return Err(GrsError::InvalidParameters(format!(
                "{} evaluation points for length {}",
                p.eval_points.len(),
                p.length
            )));
        }
        GrsCode::new(field, p.dim, p.eval_points, p.col_mults)
    }
}

impl From<GrsCode> for GrsParams {
    fn from(c: GrsCode) -> Self {
        GrsParams {
            q: c.field.modulus(),
            length: c.length,
            dim: c.dim,
            eval_points: c.points,
            col_mults: c.col_mults,
        }
    }
}

impl PartialEq for GrsCode {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.dim == other.dim
            && self.points == other.points
            && self.col_mults == other.col_mults
    }
}

impl Eq for GrsCode {}

impl GrsCode {
    /// Builds an `[n, dim]` GRS code, `n = eval_points.len()`.
    ///
    /// Evaluation points must be distinct and nonzero (so `n < q`); column
    /// multipliers must be nonzero.
    pub fn new(field: PrimeField, dim: usize, eval_points: Vec<u32>, col_mults: Vec<u32>) -> Result<Self, GrsError> {
        let n = eval_points.len();
        let bad = |m: String| Err(GrsError::InvalidParameters(m));
        if n == 0 {
            return bad("empty code".into());
        }
        if dim == 0 || dim > n {
            return bad(format!("dimension {dim} outside [1, {n}]"));
        }
        if col_mults.len() != n {
            return bad(format!("{} column multipliers for length {n}", col_mults.len()));
        }
        let q = field.modulus();
        let mut seen = vec![false; q as usize];
        for &a in &eval_points {
            if a == 0 || a >= q {
                return bad(format!("evaluation point {a} not a nonzero residue mod {q}"));
            }
            if std::mem::replace(&mut seen[a as usize], true) {
                return bad(format!("repeated evaluation point {a}"));
            }
        }
        if let Some(&v) = col_mults.iter().find(|&&v| v == 0 || v >= q) {
            return bad(format!("column multiplier {v} not a nonzero residue mod {q}"));
        }

        let f = field;
        let point_invs: Vec<u32> = eval_points.iter().map(|&a| f.inv(a)).collect();
        let dual_mults: Vec<u32> = (0..n)
            .map(|i| {
                let prod = (0..n)
                    .filter(|&j| j != i)
                    .fold(1u32, |acc, j| f.mul(acc, f.sub(eval_points[i], eval_points[j])));
                f.inv(f.mul(col_mults[i], prod))
            })
            .collect();

        // Lagrange basis on the first `dim` points, evaluated at the rest.
        let sys_parity: Vec<Vec<u32>> = (0..dim)
            .map(|i| {
                let denom = (0..dim)
                    .filter(|&l| l != i)
                    .fold(1u32, |acc, l| f.mul(acc, f.sub(eval_points[i], eval_points[l])));
                let scale = f.inv(f.mul(denom, col_mults[i]));
                (dim..n)
                    .map(|j| {
                        let num = (0..dim)
                            .filter(|&l| l != i)
                            .fold(1u32, |acc, l| f.mul(acc, f.sub(eval_points[j], eval_points[l])));
                        f.mul(f.mul(num, scale), col_mults[j])
                    })
                    .collect()
            })
            .collect();

        let mut code = GrsCode {
            field,
            length: n,
            dim,
            points: eval_points,
            col_mults,
            point_invs,
            dual_mults,
            sys_parity,
            coset_lift: Vec::new(),
        };
        let m = n - dim;
        if m > 0 {
            let h = code.parity_check_matrix();
            let tail: Vec<Vec<u32>> = h.iter().map(|row| row[dim..].to_vec()).collect();
            code.coset_lift =
                linalg::inverse(&field, &tail).expect("trailing columns of an alternant matrix are invertible");
        }
        Ok(code)
    }

    /// `[n, dim]` code over points `1..=n` with unit multipliers.
    pub fn standard(field: PrimeField, length: usize, dim: usize) -> Result<Self, GrsError> {
        if length as u64 >= field.modulus() as u64 {
            return Err(GrsError::InvalidParameters(format!(
                "length {length} needs a field larger than GF({})",
                field.modulus()
            )));
        }
        GrsCode::new(field, dim, (1..=length as u32).collect(), vec![1; length])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of parity checks, `n - k`.
    pub fn redundancy(&self) -> usize {
        self.length - self.dim
    }

    pub fn min_distance(&self) -> usize {
        self.length - self.dim + 1
    }

    pub fn rate(&self) -> f64 {
        self.dim as f64 / self.length as f64
    }

    pub fn relative_distance(&self) -> f64 {
        self.min_distance() as f64 / self.length as f64
    }

    pub fn eval_points(&self) -> &[u32] {
        &self.points
    }

    pub fn col_mults(&self) -> &[u32] {
        &self.col_mults
    }

    pub fn params(&self) -> GrsParams {
        self.clone().into()
    }

    fn check_len(&self, got: usize, expected: usize) -> Result<(), GrsError> {
        if got == expected {
            Ok(())
        } else {
            Err(GrsError::WrongLength { expected, got })
        }
    }

    /// Evaluation encoding: `msg` holds the coefficients of `p`, low degree
    /// first.
    pub fn encode(&self, msg: &[u32]) -> Result<Vec<u32>, GrsError> {
        self.check_len(msg.len(), self.dim)?;
        let f = &self.field;
        Ok(self
            .points
            .iter()
            .zip(&self.col_mults)
            .map(|(&a, &v)| {
                let p = msg.iter().rev().fold(0u32, |acc, &c| f.mul_add(c, acc, a));
                f.mul(v, p)
            })
            .collect())
    }

    /// Systematic encoding: the first `dim` symbols of the result are `info`.
    pub fn encode_systematic(&self, info: &[u32]) -> Result<Vec<u32>, GrsError> {
        self.check_len(info.len(), self.dim)?;
        let mut out = Vec::with_capacity(self.length);
        out.extend_from_slice(info);
        out.resize(self.length, 0);
        self.fill_parity(&mut out);
        Ok(out)
    }

    /// Overwrites positions `dim..n` of `word` with the systematic parity of
    /// its first `dim` symbols.
    pub fn fill_parity(&self, word: &mut [u32]) {
        let f = &self.field;
        let (info, parity) = word.split_at_mut(self.dim);
        parity.iter_mut().for_each(|p| *p = 0);
        for (&x, row) in info.iter().zip(&self.sys_parity) {
            f.axpy(parity, x, row);
        }
    }

    /// Inverse of [`GrsCode::encode_systematic`] on codewords.
    pub fn systematic_part<'a>(&self, codeword: &'a [u32]) -> &'a [u32] {
        &codeword[..self.dim]
    }

    /// The `(n - k) x n` alternant parity-check matrix.
    pub fn parity_check_matrix(&self) -> Vec<Vec<u32>> {
        let f = &self.field;
        (0..self.redundancy() as u64)
            .map(|j| {
                self.points
                    .iter()
                    .zip(&self.dual_mults)
                    .map(|(&a, &h)| f.mul(h, f.pow(a, j)))
                    .collect()
            })
            .collect()
    }

    /// `H * word`.
    pub fn syndrome(&self, word: &[u32]) -> Vec<u32> {
        self.syndrome_with(word, &[])
    }

    /// Syndrome with the listed positions treated as zero.
    fn syndrome_with(&self, word: &[u32], skip: &[usize]) -> Vec<u32> {
        let f = &self.field;
        let m = self.redundancy();
        let mut s = vec![0u32; m];
        for (i, ((&y, &a), &h)) in word.iter().zip(&self.points).zip(&self.dual_mults).enumerate() {
            if y == 0 || skip.contains(&i) {
                continue;
            }
            let mut t = f.mul(y, h);
            for sj in s.iter_mut() {
                *sj = f.add(*sj, t);
                t = f.mul(t, a);
            }
        }
        s
    }

    pub fn is_codeword(&self, word: &[u32]) -> bool {
        word.len() == self.length && self.syndrome(word).iter().all(|&x| x == 0)
    }

    /// Error-erasure decoding. Recovers the codeword whenever
    /// `2 * errors + erasures < d`.
    pub fn decode(&self, word: &[Option<u32>]) -> Result<Vec<u32>, DecodeFailure> {
        if word.len() != self.length {
            return Err(DecodeFailure);
        }
        let erasures: Vec<usize> = (0..self.length).filter(|&i| word[i].is_none()).collect();
        let mut y: Vec<u32> = word.iter().map(|s| s.unwrap_or(0)).collect();
        self.correct_in_place(&mut y, &erasures)?;
        Ok(y)
    }

    /// Errors-only decoding; corrects fewer than `d / 2` errors.
    pub fn decode_errors_only(&self, word: &[u32]) -> Result<Vec<u32>, DecodeFailure> {
        if word.len() != self.length {
            return Err(DecodeFailure);
        }
        let mut y = word.to_vec();
        self.correct_in_place(&mut y, &[])?;
        Ok(y)
    }

    /// Decodes `word` into the coset `{v : H v = h}`. Equivalent to
    /// decoding `word - t` in the code and adding `t` back, where `t` is the
    /// fixed coset representative [`GrsCode::coset_representative`].
    pub fn coset_decode(&self, h: &[u32], word: &[u32]) -> Result<Vec<u32>, DecodeFailure> {
        if word.len() != self.length || h.len() != self.redundancy() {
            return Err(DecodeFailure);
        }
        let f = &self.field;
        let t = self.coset_representative(h);
        let mut y: Vec<u32> = word.iter().zip(&t).map(|(&a, &b)| f.sub(a, b)).collect();
        self.correct_in_place(&mut y, &[])?;
        for (a, &b) in y.iter_mut().zip(&t) {
            *a = f.add(*a, b);
        }
        Ok(y)
    }

    /// The vector supported on the last `n - k` positions whose syndrome is
    /// `h`.
    pub fn coset_representative(&self, h: &[u32]) -> Vec<u32> {
        let mut t = vec![0u32; self.length];
        if !h.is_empty() {
            let tail = linalg::mat_vec(&self.field, &self.coset_lift, h);
            t[self.dim..].copy_from_slice(&tail);
        }
        t
    }

    /// Corrects `y` in place; erased positions may hold any value on entry.
    pub(crate) fn correct_in_place(&self, y: &mut [u32], erasures: &[usize]) -> Result<usize, DecodeFailure> {
        let f = &self.field;
        let m = self.redundancy();
        let b = erasures.len();
        if b > m {
            return Err(DecodeFailure);
        }
        for &e in erasures {
            y[e] = 0;
        }
        let s = self.syndrome_with(y, &[]);
        if b == 0 && s.iter().all(|&x| x == 0) {
            return Ok(0);
        }

        // Erasure locator: prod (1 - a_e x).
        let mut gamma = vec![1u32];
        for &e in erasures {
            gamma = poly_mul(f, &gamma, &[1, f.neg(self.points[e])]);
        }

        // Berlekamp–Massey seeded with the erasure locator.
        let mut lambda = gamma.clone();
        let mut prev = gamma;
        let mut len = b;
        let mut shift = 1usize;
        let mut prev_disc = 1u32;
        for r in b..m {
            let mut disc = 0u32;
            for (i, &c) in lambda.iter().enumerate().take(r + 1) {
                disc = f.mul_add(disc, c, s[r - i]);
            }
            if disc == 0 {
                shift += 1;
                continue;
            }
            let coef = f.mul(disc, f.inv(prev_disc));
            let mut next = lambda.clone();
            if next.len() < prev.len() + shift {
                next.resize(prev.len() + shift, 0);
            }
            for (i, &p) in prev.iter().enumerate() {
                next[i + shift] = f.sub(next[i + shift], f.mul(coef, p));
            }
            if 2 * len <= r + b {
                prev = std::mem::replace(&mut lambda, next);
                len = r + 1 + b - len;
                prev_disc = disc;
                shift = 1;
            } else {
                lambda = next;
                shift += 1;
            }
        }
        while lambda.len() > 1 && *lambda.last().unwrap() == 0 {
            lambda.pop();
        }
        let degree = lambda.len() - 1;
        if degree != len || 2 * len > m + b {
            return Err(DecodeFailure);
        }

        // Locations: positions whose inverse point is a root of lambda.
        let roots: Vec<usize> = (0..self.length)
            .filter(|&i| poly_eval(f, &lambda, self.point_invs[i]) == 0)
            .collect();
        if roots.len() != degree {
            return Err(DecodeFailure);
        }

        // Forney: Y = -X * Omega(X^-1) / Lambda'(X^-1), error = Y / h.
        let mut omega = poly_mul(f, &s, &lambda);
        omega.truncate(m);
        let deriv: Vec<u32> = lambda
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.reduce(i as u64)))
            .collect();
        for &i in &roots {
            let xinv = self.point_invs[i];
            let dv = poly_eval(f, &deriv, xinv);
            if dv == 0 {
                return Err(DecodeFailure);
            }
            let num = f.mul(self.points[i], poly_eval(f, &omega, xinv));
            let big_y = f.neg(f.mul(num, f.inv(dv)));
            let err = f.mul(big_y, f.inv(self.dual_mults[i]));
            y[i] = f.sub(y[i], err);
        }
        if self.syndrome(y).iter().any(|&x| x != 0) {
            return Err(DecodeFailure);
        }
        Ok(roots.len())
    }
}

fn poly_mul(f: &PrimeField, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = f.mul_add(out[i + j], x, y);
        }
    }
    out
}

fn poly_eval(f: &PrimeField, p: &[u32], x: u32) -> u32 {
    p.iter().rev().fold(0u32, |acc, &c| f.mul_add(c, acc, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn rs62() -> GrsCode {
        GrsCode::standard(gf(7), 6, 2).unwrap()
    }

    fn all_codewords(code: &GrsCode) -> Vec<Vec<u32>> {
        let q = code.field().modulus();
        let k = code.dim();
        let mut out = Vec::new();
        let mut msg = vec![0u32; k];
        loop {
            out.push(code.encode(&msg).unwrap());
            let mut i = 0;
            loop {
                if i == k {
                    return out;
                }
                msg[i] += 1;
                if msg[i] < q {
                    break;
                }
                msg[i] = 0;
                i += 1;
            }
        }
    }

    fn hamming(a: &[u32], b: &[u32]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn evaluation_encoding_examples() {
        let c = rs62();
        assert_eq!(c.encode(&[1, 0]).unwrap(), vec![1; 6]);
        assert_eq!(c.encode(&[0, 1]).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        // 2 + 3x at x = 1..6, hand-evaluated mod 7
        assert_eq!(c.encode(&[2, 3]).unwrap(), vec![5, 1, 4, 0, 3, 6]);
        assert!(matches!(
            c.encode(&[1]),
            Err(GrsError::WrongLength { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn brute_force_minimum_distance_is_mds() {
        let c = rs62();
        let words = all_codewords(&c);
        assert_eq!(words.len(), 49);
        let min = words
            .iter()
            .filter(|w| w.iter().any(|&x| x != 0))
            .map(|w| w.iter().filter(|&&x| x != 0).count())
            .min()
            .unwrap();
        assert_eq!(min, 5);
        assert_eq!(c.min_distance(), 5);
        for w in &words {
            assert!(c.is_codeword(w));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = gf(7);
        assert!(GrsCode::new(f, 2, vec![1, 1, 2], vec![1, 1, 1]).is_err());
        assert!(GrsCode::new(f, 2, vec![0, 1, 2], vec![1, 1, 1]).is_err());
        assert!(GrsCode::new(f, 2, vec![1, 2, 3], vec![1, 0, 1]).is_err());
        assert!(GrsCode::new(f, 4, vec![1, 2, 3], vec![1, 1, 1]).is_err());
        assert!(GrsCode::standard(f, 7, 2).is_err());
    }

    #[test]
    fn two_errors_decode_to_unique_nearest() {
        let c = rs62();
        let sent = vec![1, 2, 3, 4, 5, 6];
        let mut recv = sent.clone();
        recv[0] = 5;
        recv[1] = 5;
        // brute force: the transmitted word is the unique nearest codeword
        let words = all_codewords(&c);
        let dists: Vec<usize> = words.iter().map(|w| hamming(w, &recv)).collect();
        let best = *dists.iter().min().unwrap();
        assert_eq!(best, 2);
        assert_eq!(dists.iter().filter(|&&d| d == best).count(), 1);
        assert_eq!(c.decode_errors_only(&recv).unwrap(), sent);
    }

    #[test]
    fn erasures_only_interpolate() {
        let c = rs62();
        let sent = c.encode(&[2, 3]).unwrap();
        let mut recv: Vec<Option<u32>> = sent.iter().copied().map(Some).collect();
        for i in [0, 2, 3, 5] {
            recv[i] = None;
        }
        assert_eq!(c.decode(&recv).unwrap(), sent);
        recv[1] = None;
        assert_eq!(c.decode(&recv), Err(DecodeFailure));
    }

    #[test]
    fn clean_and_zero_words_decode_to_themselves() {
        let c = rs62();
        assert_eq!(c.decode_errors_only(&[0; 6]).unwrap(), vec![0; 6]);
        let w = c.encode(&[4, 1]).unwrap();
        let ow: Vec<Option<u32>> = w.iter().copied().map(Some).collect();
        assert_eq!(c.decode(&ow).unwrap(), w);
    }

    #[test]
    fn beyond_radius_never_panics() {
        let c = rs62();
        let sent = c.encode(&[3, 3]).unwrap();
        for mask in 0u32..64 {
            if mask.count_ones() != 3 {
                continue;
            }
            let mut recv = sent.clone();
            for i in 0..6 {
                if mask >> i & 1 == 1 {
                    recv[i] = (recv[i] + 1) % 7;
                }
            }
            // beyond the radius anything but a non-codeword is allowed
            if let Ok(out) = c.decode_errors_only(&recv) {
                assert!(c.is_codeword(&out));
            }
        }
    }

    #[test]
    fn systematic_encoding_round_trip() {
        let f = gf(37);
        let c = GrsCode::new(f, 5, (3..15).collect(), (1..13).map(|x| x * 2).collect()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let info: Vec<u32> = (0..5).map(|_| rng.gen_range(0..37)).collect();
            let cw = c.encode_systematic(&info).unwrap();
            assert!(c.is_codeword(&cw));
            assert_eq!(c.systematic_part(&cw), &info[..]);
        }
    }

    #[test]
    fn parity_check_annihilates_generator() {
        let f = gf(11);
        let c = GrsCode::new(f, 3, vec![2, 3, 5, 7, 9, 10], vec![1, 4, 4, 2, 9, 3]).unwrap();
        let h = c.parity_check_matrix();
        assert_eq!(h.len(), 3);
        for i in 0..3 {
            let mut msg = vec![0; 3];
            msg[i] = 1;
            let g = c.encode(&msg).unwrap();
            assert!(linalg::mat_vec(&f, &h, &g).iter().all(|&x| x == 0));
        }
        assert_eq!(linalg::rank(&f, h, 6), 3);
    }

    #[test]
    fn coset_decoding_examples() {
        let c = rs62();
        let f = c.field();
        // h = 0 reduces to plain decoding
        let sent = c.encode(&[1, 5]).unwrap();
        let mut recv = sent.clone();
        recv[4] = 0;
        assert_eq!(c.coset_decode(&[0, 0, 0, 0], &recv).unwrap(), sent);

        let h = vec![3, 0, 6, 1];
        let t = c.coset_representative(&h);
        assert_eq!(c.syndrome(&t), h);
        // the representative is a fixed point
        assert_eq!(c.coset_decode(&h, &t).unwrap(), t);

        // coset word + one error, checked against brute force over the coset
        let coset: Vec<Vec<u32>> = all_codewords(&c)
            .into_iter()
            .map(|w| w.iter().zip(&t).map(|(&a, &b)| f.add(a, b)).collect())
            .collect();
        let target = coset[17].clone();
        let mut noisy = target.clone();
        noisy[2] = f.add(noisy[2], 4);
        let nearest: Vec<&Vec<u32>> = coset.iter().filter(|w| hamming(w, &noisy) <= 1).collect();
        assert_eq!(nearest, vec![&target]);
        assert_eq!(c.coset_decode(&h, &noisy).unwrap(), target);
    }

    #[test]
    fn exhaustive_error_erasure_contract_on_62_code() {
        let c = rs62();
        let f = c.field();
        let words = all_codewords(&c);
        for cw in &words {
            for erase_mask in 0u32..64 {
                let b = erase_mask.count_ones() as usize;
                if b >= 5 {
                    continue;
                }
                let max_errors = (4 - b) / 2;
                for err_mask in 0u32..64 {
                    let a = err_mask.count_ones() as usize;
                    if err_mask & erase_mask != 0 || a > max_errors {
                        continue;
                    }
                    let mut recv: Vec<Option<u32>> = cw.iter().copied().map(Some).collect();
                    for i in 0..6 {
                        if erase_mask >> i & 1 == 1 {
                            recv[i] = None;
                        } else if err_mask >> i & 1 == 1 {
                            recv[i] = Some(f.add(cw[i], 1 + (i as u32 % 6)));
                        }
                    }
                    assert_eq!(c.decode(&recv).as_ref(), Ok(cw), "a={a} b={b}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn random_patterns_within_radius(seed in any::<u64>(), n in 4usize..30, k_frac in 0.1f64..0.9) {
            let f = gf(31);
            let k = ((n as f64 * k_frac) as usize).clamp(1, n);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mults: Vec<u32> = (0..n).map(|_| rng.gen_range(1..31)).collect();
            let pts: Vec<u32> = sample(&mut rng, 30, n).into_iter().map(|x| x as u32 + 1).collect();
            let c = GrsCode::new(f, k, pts, mults).unwrap();
            let msg: Vec<u32> = (0..k).map(|_| rng.gen_range(0..31)).collect();
            let cw = c.encode(&msg).unwrap();
            let d = c.min_distance();
            let b = rng.gen_range(0..d);
            let a = (d - 1 - b) / 2;
            let pos = sample(&mut rng, n, a + b).into_vec();
            let mut recv: Vec<Option<u32>> = cw.iter().copied().map(Some).collect();
            for (j, &p) in pos.iter().enumerate() {
                recv[p] = if j < b { None } else { Some(f.add(cw[p], rng.gen_range(1..31))) };
            }
            prop_assert_eq!(c.decode(&recv).unwrap(), cw);
        }

        #[test]
        fn encoding_is_linear(a in prop::collection::vec(0u32..7, 2), b in prop::collection::vec(0u32..7, 2)) {
            let c = rs62();
            let f = c.field();
            let sum: Vec<u32> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
            let lhs = c.encode(&sum).unwrap();
            let rhs: Vec<u32> = c.encode(&a).unwrap().iter().zip(c.encode(&b).unwrap()).map(|(&x, y)| f.add(x, y)).collect();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
