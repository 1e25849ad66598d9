use num_traits::{One, Zero};

use crate::rational::Q;

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, p) in row.iter_mut().zip(&pivot) {
                    *v -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A nonzero kernel vector with the first free variable set to 1, or `None`
/// when the columns are independent.
pub fn kernel_vector(m: &[Vec<Q>], cols: usize) -> Option<Vec<Q>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free = (0..cols).find(|c| !pivots.contains(c))?;
    let mut v = vec![Q::zero(); cols];
    v[free] = Q::one();
    for (row, &p) in pivots.iter().enumerate() {
        v[p] = -a[row][free].clone();
    }
    Some(v)
}
