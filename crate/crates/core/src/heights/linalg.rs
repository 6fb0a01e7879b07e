use crate::exactalg::{ExtField, FqElem};

/// Row echelon form in place; returns the pivot columns.
fn echelon(rows: &mut [Vec<FqElem>]) -> Vec<usize> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else { continue };
        rows.swap(r, k);
        let inv = rows[r][c].inv().unwrap();
        for x in rows[r].iter_mut() {
            *x = *x * inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let f = rows[k][c];
                let (head, tail) = if k < r { rows.split_at_mut(r) } else { rows.split_at_mut(k) };
                let (pivot_row, target) = if k < r { (&tail[0], &mut head[k]) } else { (&head[r], &mut tail[0]) };
                for (t, &s) in target.iter_mut().zip(pivot_row.iter()) {
                    *t = *t - f * s;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(mut rows: Vec<Vec<FqElem>>) -> usize {
    echelon(&mut rows).len()
}

/// A basis of {x : rows·x = 0} for a system in `cols` unknowns.
pub fn kernel(mut rows: Vec<Vec<FqElem>>, cols: usize, p: u32) -> Vec<Vec<FqElem>> {
    let pivots = echelon(&mut rows);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![FqElem::zero(p); cols];
        x[free] = FqElem::one(p);
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = -rows[r][free];
        }
        basis.push(x);
    }
    basis
}

/// Rank over F_{p^d} of a matrix of element codes.
pub fn rank_ext(mut rows: Vec<Vec<u32>>, field: &ExtField) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let units = field.order() - 1;
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c] != 0) else { continue };
        rows.swap(r, k);
        let inv = field.exp(units - field.log(rows[r][c]));
        let pivot: Vec<u32> = rows[r].iter().map(|&x| field.mul(x, inv)).collect();
        for row in rows.iter_mut().skip(r + 1) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (t, &s) in row.iter_mut().zip(&pivot) {
                *t = field.add(*t, field.neg(field.mul(f, s)));
            }
        }
        rows[r] = pivot;
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(p: u32, rows: &[&[i64]]) -> Vec<Vec<FqElem>> {
        rows.iter().map(|r| r.iter().map(|&x| FqElem::new(x, p)).collect()).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(5, &[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(a.clone()), 2);
        let ker = kernel(a.clone(), 3, 5);
        assert_eq!(ker.len(), 1);
        for row in &a {
            let dot = row.iter().zip(&ker[0]).fold(FqElem::zero(5), |acc, (&x, &y)| acc + x * y);
            assert!(dot.is_zero());
        }
        assert_eq!(kernel(Vec::new(), 2, 5).len(), 2);
        assert_eq!(rank(m(7, &[&[0, 1], &[1, 0]])), 2);
        let f = ExtField::new(5, 2);
        assert_eq!(rank_ext(vec![vec![1, 2, 3], vec![2, 4, 1], vec![0, 1, 1]], &f), 2);
    }
}
