//! Exact integer linear algebra.

use num_bigint::BigInt;
use num_traits::Zero;

/// Rank of an integer matrix by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let height = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..width {
        if r == height {
            break;
        }
        let Some(pivot) = (r..height).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in r + 1..height {
            for j in c + 1..width {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
    }
    r
}

/// Transpose of a dense matrix with `width` columns.
pub fn transpose(rows: &[Vec<i64>], width: usize) -> Vec<Vec<i64>> {
    (0..width).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Dimension of the affine hull of a point set (−1 for the empty set).
pub fn affine_hull_dimension(points: &[Vec<i64>]) -> isize {
    let Some(origin) = points.first() else {
        return -1;
    };
    let diffs: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(origin).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs) as isize
}
