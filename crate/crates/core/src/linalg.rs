//! Exact row reduction over Gaussian rationals.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::scalar::GaussianRational;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn row_reduce(rows: &mut Vec<Vec<GaussianRational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv();
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in c..ncols {
                    let t = &f * &rows[r][j];
                    rows[i][j] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank(rows: &[Vec<GaussianRational>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m, ncols).len()
}

/// Basis of `{x : A x = 0}`, one vector per free column.
pub fn nullspace(rows: &[Vec<GaussianRational>], ncols: usize) -> Vec<Vec<GaussianRational>> {
    let mut m = rows.to_vec();
    let pivots = row_reduce(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![GaussianRational::zero(); ncols];
        x[free] = GaussianRational::one();
        for (row, &p) in m.iter().zip(&pivots) {
            x[p] = -row[free].clone();
        }
        basis.push(x);
    }
    basis
}

/// Row echelon form built one sparse row at a time, for systems with many
/// redundant equations.
#[derive(Debug, Clone)]
pub struct SparseEchelon {
    ncols: usize,
    /// Pivot column -> row normalized to 1 at the pivot.
    rows: BTreeMap<usize, BTreeMap<usize, GaussianRational>>,
}

impl SparseEchelon {
    pub fn new(ncols: usize) -> Self {
        Self { ncols, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the stored pivots and keeps it if independent.
    pub fn insert(&mut self, mut row: BTreeMap<usize, GaussianRational>) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some(c) = row.keys().copied().find(|c| self.rows.contains_key(c)) else {
                break;
            };
            let f = row[&c].clone();
            for (j, v) in &self.rows[&c] {
                let e = row.entry(*j).or_insert_with(GaussianRational::zero);
                *e -= &(&f * v);
                if e.is_zero() {
                    row.remove(j);
                }
            }
        }
        let Some((&p, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.inv();
        for v in row.values_mut() {
            *v = &*v * &inv;
        }
        self.rows.insert(p, row);
        true
    }

    /// Basis of the solution space, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<GaussianRational>> {
        // back-substitute so each pivot row only mentions free columns
        let mut reduced: BTreeMap<usize, BTreeMap<usize, GaussianRational>> = BTreeMap::new();
        for (&p, row) in self.rows.iter().rev() {
            let mut r: BTreeMap<usize, GaussianRational> = BTreeMap::new();
            for (j, v) in row {
                if *j == p {
                    continue;
                }
                match reduced.get(j) {
                    Some(sub) => {
                        for (f, w) in sub {
                            let e = r.entry(*f).or_insert_with(GaussianRational::zero);
                            *e -= &(v * w);
                        }
                    }
                    None => {
                        let e = r.entry(*j).or_insert_with(GaussianRational::zero);
                        *e += v;
                    }
                }
            }
            r.retain(|_, v| !v.is_zero());
            reduced.insert(p, r);
        }
        (0..self.ncols)
            .filter(|c| !self.rows.contains_key(c))
            .map(|free| {
                let mut x = vec![GaussianRational::zero(); self.ncols];
                x[free] = GaussianRational::one();
                for (&p, r) in &reduced {
                    if let Some(v) = r.get(&free) {
                        x[p] = -v.clone();
                    }
                }
                x
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn nullspace_of_rank_one() {
        let a = vec![vec![g(1), g(2), g(3)], vec![g(2), g(4), g(6)]];
        let ns = nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot = row.iter().zip(v).fold(GaussianRational::zero(), |acc, (x, y)| acc + x * y);
                assert!(dot.is_zero());
            }
        }
        assert_eq!(rank(&a, 3), 1);
    }

    #[test]
    fn complex_pivots() {
        let i = GaussianRational::i();
        let a = vec![vec![i.clone(), g(1)], vec![g(1), -i]];
        // second row = -i * first row
        assert_eq!(rank(&a, 2), 1);
    }

    #[test]
    fn sparse_matches_dense() {
        let a = vec![
            vec![g(1), g(-1), g(0), g(0)],
            vec![g(0), g(1), g(-1), g(0)],
            vec![g(1), g(0), g(-1), g(0)],
            vec![g(0), g(0), g(2), g(3)],
        ];
        let mut e = SparseEchelon::new(4);
        for row in &a {
            e.insert(row.iter().cloned().enumerate().collect());
        }
        assert_eq!(e.rank(), rank(&a, 4));
        let ns = e.nullspace();
        assert_eq!(ns.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&ns[0]).fold(GaussianRational::zero(), |acc, (x, y)| acc + x * y);
            assert!(dot.is_zero());
        }
    }
}
