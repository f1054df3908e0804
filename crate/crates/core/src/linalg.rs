//! Exact dense row reduction over any crate field. Matrices here are tiny
//! (at most a few hundred rows by 20 columns), so clarity beats cleverness.

use crate::field::{Field, FieldElement};

/// Reduces `rows` in place to reduced row echelon form, processing columns
/// in the order given by `col_order` (which must be a permutation of
/// 0..ncols). Returns the pivot columns in processing order. Zero rows sink
/// to the bottom.
pub(crate) fn rref_with_order(rows: &mut [Vec<FieldElement>], col_order: &[usize]) -> Vec<usize> {
    let nrows = rows.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in col_order {
        if r == nrows {
            break;
        }
        let Some(pivot_row) = (r..nrows).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot_row);
        let inv = rows[r][c].inv().expect("pivot nonzero");
        for x in rows[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..nrows {
            if i != r && !rows[i][c].is_zero() {
                let factor = rows[i][c].clone();
                for j in 0..rows[i].len() {
                    let delta = &factor * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub(crate) fn rref(rows: &mut [Vec<FieldElement>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let order: Vec<usize> = (0..ncols).collect();
    rref_with_order(rows, &order)
}

/// Basis of the right kernel {x : A x = 0}, one vector per non-pivot
/// column, deterministic for a fixed column order. The free coordinate of
/// each basis vector is 1.
pub(crate) fn kernel_basis_with_order(
    rows: &[Vec<FieldElement>],
    ncols: usize,
    field: &Field,
    col_order: &[usize],
) -> Vec<Vec<FieldElement>> {
    let mut work: Vec<Vec<FieldElement>> = rows.to_vec();
    let pivots = rref_with_order(&mut work, col_order);
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for &free in col_order.iter().filter(|c| !pivot_set.contains(c)) {
        let mut v = vec![field.zero(); ncols];
        v[free] = field.one();
        for (row_idx, &pc) in pivots.iter().enumerate() {
            v[pc] = -&work[row_idx][free];
        }
        basis.push(v);
    }
    basis
}

pub(crate) fn kernel_basis(
    rows: &[Vec<FieldElement>],
    ncols: usize,
    field: &Field,
) -> Vec<Vec<FieldElement>> {
    let order: Vec<usize> = (0..ncols).collect();
    kernel_basis_with_order(rows, ncols, field, &order)
}

/// Solves A x = b for square or overdetermined consistent systems.
/// Returns None when the system is inconsistent or underdetermined.
pub(crate) fn solve_linear(
    rows: &[Vec<FieldElement>],
    rhs: &[FieldElement],
    field: &Field,
) -> Option<Vec<FieldElement>> {
    assert_eq!(rows.len(), rhs.len());
    let ncols = rows.first()?.len();
    let mut aug: Vec<Vec<FieldElement>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let order: Vec<usize> = (0..ncols).collect();
    let pivots = rref_with_order(&mut aug, &order);
    // Inconsistent: a nonzero entry in the rhs column of a zero row.
    for row in aug.iter().skip(pivots.len()) {
        if !row[ncols].is_zero() {
            return None;
        }
    }
    if pivots.len() < ncols {
        return None;
    }
    let mut x = vec![field.zero(); ncols];
    for (row_idx, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row_idx][ncols].clone();
    }
    Some(x)
}

/// Rank of the matrix.
pub(crate) fn rank(rows: &[Vec<FieldElement>]) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn mat(field: &Field, data: &[&[i64]]) -> Vec<Vec<FieldElement>> {
        data.iter()
            .map(|row| row.iter().map(|&x| field.from_int(x)).collect())
            .collect()
    }

    #[test]
    fn kernel_matches_direct_verification_over_gf5() {
        let f = Field::gf(5).unwrap();
        let rows = mat(&f, &[&[1, 2, 3, 4], &[0, 1, 1, 0]]);
        let basis = kernel_basis(&rows, 4, &f);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for row in &rows {
                let mut acc = f.zero();
                for (a, b) in row.iter().zip(v) {
                    acc = &acc + &(a * b);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn kernel_dimension_plus_rank_is_ncols() {
        let f = Field::gf(3).unwrap();
        let rows = mat(&f, &[&[1, 0, 2], &[2, 0, 1], &[0, 1, 0]]);
        let r = rank(&rows);
        let k = kernel_basis(&rows, 3, &f).len();
        assert_eq!(r + k, 3);
    }

    #[test]
    fn different_column_orders_span_the_same_kernel() {
        let f = Field::gf(7).unwrap();
        let rows = mat(&f, &[&[1, 2, 3, 4, 5], &[6, 5, 4, 3, 2], &[1, 1, 1, 1, 1]]);
        let fwd = kernel_basis(&rows, 5, &f);
        let rev_order: Vec<usize> = (0..5).rev().collect();
        let rev = kernel_basis_with_order(&rows, 5, &f, &rev_order);
        assert_eq!(fwd.len(), rev.len());
        // Each reversed-order vector must be a combination of the forward
        // basis: stacking either way keeps the rank at the kernel dimension.
        let mut stacked = fwd.clone();
        stacked.extend(rev.clone());
        assert_eq!(rank(&stacked), fwd.len());
    }

    #[test]
    fn solve_recovers_unique_solutions_and_detects_inconsistency() {
        let f = Field::gf(5).unwrap();
        let rows = mat(&f, &[&[1, 1], &[1, 2], &[1, 3]]);
        let rhs = vec![f.from_int(3), f.from_int(4), f.from_int(0)];
        let x = solve_linear(&rows, &rhs, &f).unwrap();
        assert_eq!(x, vec![f.from_int(2), f.from_int(1)]);
        let bad_rhs = vec![f.from_int(3), f.from_int(4), f.from_int(1)];
        assert!(solve_linear(&rows, &bad_rhs, &f).is_none());
    }
}
