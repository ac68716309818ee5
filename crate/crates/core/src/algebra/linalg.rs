//! Dense exact linear algebra over `Rat`, plus determinants of polynomial
//! matrices.

use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::mpoly::MPoly;
use super::rat::Rat;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(rows: &mut [Vec<Rat>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
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
        let inv = Rat::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x -= &f * y;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn det(m: &[Vec<Rat>]) -> Rat {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &piv;
            let (top, bottom) = a.split_at_mut(i);
            for (x, y) in bottom[0].iter_mut().zip(&top[c]).skip(c) {
                *x -= &f * y;
            }
        }
    }
    d
}

/// Basis of the null space `{x : Σ_j x_j·col_j = 0}` of the matrix whose
/// rows are `rows` (so `rows[i][j]` is row i, column j).
pub fn null_space(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

/// Determinant of a square polynomial matrix by expansion over column
/// subsets (exact, no division).
pub fn det_mpoly(m: &[Vec<MPoly>], nvars: usize) -> MPoly {
    let n = m.len();
    if n == 0 {
        return MPoly::one(nvars);
    }
    assert!(n <= 20, "determinant too large for subset expansion");
    // layer[mask] = signed sum over ways to fill the first popcount(mask)
    // rows with the columns in mask.
    let mut layer: FxHashMap<u32, MPoly> = FxHashMap::default();
    layer.insert(0, MPoly::one(nvars));
    for row in m.iter() {
        let mut next: FxHashMap<u32, MPoly> = FxHashMap::default();
        for (mask, acc) in &layer {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero() {
                    continue;
                }
                // Sign: number of already-used columns to the right of c.
                let above = (mask >> (c + 1)).count_ones();
                let mut term = acc * entry;
                if above % 2 == 1 {
                    term = -term;
                }
                let slot = next.entry(mask | (1 << c)).or_insert_with(|| MPoly::zero(nvars));
                slot.add_assign_ref(&term);
            }
        }
        layer = next;
    }
    layer
        .remove(&((1u32 << n) - 1))
        .unwrap_or_else(|| MPoly::zero(nvars))
}
