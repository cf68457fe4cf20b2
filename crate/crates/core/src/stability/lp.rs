//! Exact feasibility of `M u = b, u ≥ 0` over ℚ.
//!
//! Phase one of the simplex method on the artificial problem, Bland's rule
//! for pivot choice so it terminates, all entries `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A feasible point if one exists.
pub fn feasible_point(m: &[Vec<i64>], b: &[i64]) -> Option<Vec<BigRational>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    assert_eq!(rows, b.len(), "right side length");
    if rows == 0 {
        return Some(vec![BigRational::zero(); cols]);
    }
    // tableau: [M | I | b], flipping rows with b < 0
    let width = cols + rows + 1;
    let mut t: Vec<Vec<BigRational>> = (0..rows)
        .map(|i| {
            let flip = b[i] < 0;
            let s = |x: i64| BigRational::from_integer(BigInt::from(if flip { -x } else { x }));
            let mut row: Vec<BigRational> = m[i].iter().map(|&x| s(x)).collect();
            row.extend((0..rows).map(|k| if k == i { BigRational::one() } else { BigRational::zero() }));
            row.push(s(b[i]));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (cols..cols + rows).collect();
    // objective: minimize the artificial sum; reduced costs = -(column sums) on originals
    let mut obj: Vec<BigRational> = vec![BigRational::zero(); width];
    for row in &t {
        for (j, v) in row.iter().enumerate() {
            if j < cols || j == width - 1 {
                obj[j] -= v;
            }
        }
    }
    while let Some(enter) = (0..cols + rows).find(|&j| obj[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // the artificial objective is bounded below by 0
        let (r, _) = leave.expect("phase one is bounded");
        pivot(&mut t, &mut obj, r, enter);
        basis[r] = enter;
    }
    if !obj[width - 1].is_zero() {
        return None;
    }
    let mut u = vec![BigRational::zero(); cols];
    for (i, &j) in basis.iter().enumerate() {
        if j < cols {
            u[j] = t[i][width - 1].clone();
        }
    }
    Some(u)
}

fn pivot(t: &mut [Vec<BigRational>], obj: &mut [BigRational], r: usize, c: usize) {
    let p = t[r][c].clone();
    for v in t[r].iter_mut() {
        *v /= &p;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            *v -= &f * pv;
        }
    }
    if !obj[c].is_zero() {
        let f = obj[c].clone();
        for (v, pv) in obj.iter_mut().zip(&pivot_row) {
            *v -= &f * pv;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &[Vec<i64>], b: &[i64], u: &[BigRational]) {
        for (row, &bi) in m.iter().zip(b) {
            let s: BigRational = row
                .iter()
                .zip(u)
                .map(|(&a, x)| BigRational::from_integer(a.into()) * x)
                .sum();
            assert_eq!(s, BigRational::from_integer(bi.into()));
        }
        assert!(u.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn feasible_and_not() {
        let m = vec![vec![1, 1, -1, -1]];
        let u = feasible_point(&m, &[1]).unwrap();
        check(&m, &[1], &u);
        assert!(feasible_point(&[vec![-1, -1]], &[1]).is_none());
        let m2 = vec![vec![1, 0, 1], vec![0, 1, 1]];
        let u2 = feasible_point(&m2, &[-2, 3]);
        assert!(u2.is_none());
        let u3 = feasible_point(&m2, &[2, 3]).unwrap();
        check(&m2, &[2, 3], &u3);
    }

    #[test]
    fn rational_only_solutions() {
        let m = vec![vec![2, 0], vec![0, 2]];
        let u = feasible_point(&m, &[1, 3]).unwrap();
        assert_eq!(u[0], BigRational::new(1.into(), 2.into()));
        check(&m, &[1, 3], &u);
    }

    #[test]
    fn degenerate_and_empty() {
        assert!(feasible_point(&[vec![]], &[0]).is_some());
        assert!(feasible_point(&[vec![]], &[1]).is_none());
        let m = vec![vec![1, -1], vec![1, -1]];
        check(&m, &[0, 0], &feasible_point(&m, &[0, 0]).unwrap());
        assert!(feasible_point(&m, &[1, 2]).is_none());
    }
}
