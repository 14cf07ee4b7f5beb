//! Dense linear algebra over GF(q): reduced row echelon form, rank,
//! nullspace bases and inverses.
//!
//! Rows are eliminated with unreduced `u64` accumulators. A pivot row is
//! reduced before it is used, so every update adds less than `q^2 < 2^32`
//! to an entry and a row can absorb billions of updates before the single
//! final reduction.

use rayon::prelude::*;

use crate::gf::PrimeField;

/// A matrix in reduced row echelon form, zero rows dropped.
#[derive(Debug, Clone)]
pub struct Rref {
    cols: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Columns without a pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols).filter(|&c| !is_pivot[c]).collect()
    }

    /// Basis of the right nullspace. Vector `j` has a one at the `j`-th free
    /// column and zeros at every other free column, so a nullspace vector's
    /// coordinates in this basis are its entries on the free columns.
    pub fn nullspace_basis(&self, field: &PrimeField) -> Vec<Vec<u32>> {
        let free = self.free_columns();
        free.par_iter()
            .map(|&f| {
                let mut v = vec![0u32; self.cols];
                v[f] = 1;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    v[p] = field.neg(row[f]);
                }
                v
            })
            .collect()
    }
}

/// Row-reduces `rows` (each of length `cols`).
pub fn rref(field: &PrimeField, rows: Vec<Vec<u32>>, cols: usize) -> Rref {
    let q = field.modulus() as u64;
    let mut work: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|r| {
            assert_eq!(r.len(), cols, "ragged matrix");
            r.into_iter().map(u64::from).collect()
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prow = 0usize;
    for col in 0..cols {
        if prow == work.len() {
            break;
        }
        let Some(found) = (prow..work.len()).find(|&r| work[r][col] % q != 0) else {
            continue;
        };
        work.swap(prow, found);
        let mut pivot = std::mem::take(&mut work[prow]);
        let scale = field.inv((pivot[col] % q) as u32) as u64;
        for x in pivot[col..].iter_mut() {
            *x = (*x % q) * scale % q;
        }
        work.par_iter_mut().enumerate().for_each(|(i, r)| {
            if i == prow {
                return;
            }
            let c = r[col] % q;
            if c != 0 {
                let f = q - c;
                for (x, &p) in r[col..].iter_mut().zip(&pivot[col..]) {
                    *x += f * p;
                }
            }
        });
        work[prow] = pivot;
        pivots.push(col);
        prow += 1;
    }
    work.truncate(pivots.len());
    let rows = work
        .into_iter()
        .map(|r| r.into_iter().map(|x| (x % q) as u32).collect())
        .collect();
    Rref { cols, rows, pivots }
}

pub fn rank(field: &PrimeField, rows: Vec<Vec<u32>>, cols: usize) -> usize {
    rref(field, rows, cols).rank()
}

/// Inverse of a square matrix, or `None` when singular.
pub fn inverse(field: &PrimeField, m: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
    let n = m.len();
    let aug: Vec<Vec<u32>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| u32::from(i == j)));
            r
        })
        .collect();
    let red = rref(field, aug, 2 * n);
    if red.rank() < n || red.pivots[n - 1] != n - 1 {
        return None;
    }
    Some(red.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec(field: &PrimeField, m: &[Vec<u32>], v: &[u32]) -> Vec<u32> {
    m.iter().map(|row| field.dot(row, v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    #[test]
    fn identity_has_full_rank() {
        let f = gf(7);
        let id: Vec<Vec<u32>> = (0..4).map(|i| (0..4).map(|j| u32::from(i == j)).collect()).collect();
        let r = rref(&f, id.clone(), 4);
        assert_eq!(r.rank(), 4);
        assert!(r.nullspace_basis(&f).is_empty());
        assert_eq!(inverse(&f, &id).unwrap(), id);
    }

    #[test]
    fn dependent_rows() {
        let f = gf(5);
        // third row = first + 2 * second
        let m = vec![vec![1, 2, 3], vec![0, 1, 4], vec![1, 4, 1]];
        let r = rref(&f, m.clone(), 3);
        assert_eq!(r.rank(), 2);
        assert_eq!(r.free_columns(), vec![2]);
        let basis = r.nullspace_basis(&f);
        assert_eq!(basis.len(), 1);
        assert!(mat_vec(&f, &m, &basis[0]).iter().all(|&x| x == 0));
        assert!(inverse(&f, &m).is_none());
    }

    #[test]
    fn random_nullspace_and_inverse() {
        let f = gf(37);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let rows = rng.gen_range(1..12);
            let cols = rng.gen_range(1..15);
            let m: Vec<Vec<u32>> = (0..rows)
                .map(|_| (0..cols).map(|_| rng.gen_range(0..37)).collect())
                .collect();
            let r = rref(&f, m.clone(), cols);
            let basis = r.nullspace_basis(&f);
            assert_eq!(basis.len() + r.rank(), cols);
            for b in &basis {
                assert!(mat_vec(&f, &m, b).iter().all(|&x| x == 0));
            }
            let sq: Vec<Vec<u32>> = (0..6).map(|_| (0..6).map(|_| rng.gen_range(0..37)).collect()).collect();
            if let Some(inv) = inverse(&f, &sq) {
                for i in 0..6 {
                    let col: Vec<u32> = (0..6).map(|k| inv[k][i]).collect();
                    let e = mat_vec(&f, &sq, &col);
                    for (j, &x) in e.iter().enumerate() {
                        assert_eq!(x, u32::from(i == j));
                    }
                }
            } else {
                assert!(rank(&f, sq, 6) < 6);
            }
        }
    }
}
