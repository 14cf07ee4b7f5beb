//! Seeded corruption of transmitted words.
//!
//! Every trial draws from its own ChaCha stream, selected by the trial
//! index, so a batch of trials gives the same patterns whether it runs
//! serially or in parallel.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gf::PrimeField;
use crate::tanner::PhiWord;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Positions to corrupt; the two lists are disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub errors: Vec<usize>,
    pub erasures: Vec<usize>,
}

impl Pattern {
    /// `t` error and `rho` erasure positions, uniform without replacement
    /// among `n`.
    pub fn sample<R: Rng + ?Sized>(n: usize, t: usize, rho: usize, rng: &mut R) -> Pattern {
        assert!(t + rho <= n, "more corrupted positions than symbols");
        let picked = sample(rng, n, t + rho).into_vec();
        let (erasures, errors) = picked.split_at(rho);
        Pattern {
            errors: errors.to_vec(),
            erasures: erasures.to_vec(),
        }
    }
}

/// A uniformly random vector of `F^w` different from `sym`.
pub fn other_symbol<R: Rng + ?Sized>(field: &PrimeField, sym: &[u32], rng: &mut R) -> Vec<u32> {
    loop {
        let cand: Vec<u32> = sym.iter().map(|_| field.random(rng)).collect();
        if cand != sym {
            return cand;
        }
    }
}

/// Applies `pattern` to `word`; error positions get a fresh symbol.
pub fn corrupt_phi<R: Rng + ?Sized>(field: &PrimeField, word: &PhiWord, pattern: &Pattern, rng: &mut R) -> PhiWord {
    let mut out = word.clone();
    for &i in &pattern.erasures {
        out.entries[i] = None;
    }
    for &i in &pattern.errors {
        let sym = word.entries[i].as_ref().expect("error position on an erased symbol");
        out.entries[i] = Some(other_symbol(field, sym, rng));
    }
    out
}

/// Adds `total` nonzero offsets to distinct entries of `rows`. The entries
/// are confined to a random set of rows whose size is itself random, so
/// patterns range from scattered noise to a few fully corrupted rows.
pub fn corrupt_rows<R: Rng + ?Sized>(field: &PrimeField, rows: &mut [Vec<u32>], total: usize, rng: &mut R) {
    if total == 0 {
        return;
    }
    let len = rows[0].len();
    assert!(total <= rows.len() * len, "more errors than entries");
    let hit = rng.gen_range(total.div_ceil(len)..=total.min(rows.len()));
    let chosen = sample(rng, rows.len(), hit).into_vec();
    for cell in sample(rng, hit * len, total) {
        let (r, c) = (chosen[cell / len], cell % len);
        let shift = rng.gen_range(1..field.modulus());
        rows[r][c] = field.add(rows[r][c], shift);
    }
}

pub fn random_vector<R: Rng + ?Sized>(field: &PrimeField, len: usize, rng: &mut R) -> Vec<u32> {
    (0..len).map(|_| field.random(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_are_disjoint_and_reproducible() {
        let a = Pattern::sample(50, 5, 7, &mut trial_rng(3, 9));
        let b = Pattern::sample(50, 5, 7, &mut trial_rng(3, 9));
        let c = Pattern::sample(50, 5, 7, &mut trial_rng(3, 10));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!((a.errors.len(), a.erasures.len()), (5, 7));
        assert!(a.errors.iter().all(|e| !a.erasures.contains(e)));
    }

    #[test]
    fn corruption_changes_exactly_the_pattern() {
        let f = PrimeField::new(3).unwrap();
        let word = PhiWord::from_symbols(vec![vec![0, 1]; 20]);
        let mut rng = trial_rng(1, 0);
        let p = Pattern::sample(20, 6, 4, &mut rng);
        let y = corrupt_phi(&f, &word, &p, &mut rng);
        assert_eq!(y.distance(&word), 10);
        assert_eq!(y.erasures(), 4);
    }
}
