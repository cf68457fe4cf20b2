//! Exact integer matrices: Hermite and Smith normal forms, kernels,
//! determinants and rational solves.
//!
//! Everything here works over `BigInt`; callers convert back to machine
//! integers at the boundary.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A dense integer matrix with explicit shape, so that matrices with zero
/// rows still know their column count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<BigInt>>,
}

/// Row-style Hermite normal form `U * M = H`.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub h: ZMatrix,
    pub u: ZMatrix,
    /// Pivot column of each nonzero row of `h`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

impl ZMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        ZMatrix {
            nrows,
            ncols,
            rows: vec![vec![BigInt::zero(); ncols]; nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.rows[i][i] = BigInt::one();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<BigInt>>, ncols: usize) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
        ZMatrix {
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    pub fn from_i64(rows: &[Vec<i64>], ncols: usize) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
            ncols,
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t.rows[j][i] = self.rows[i][j].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.ncols, other.nrows, "shape mismatch in product");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self.rows[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    out.rows[i][j] += a * &other.rows[k][j];
                }
            }
        }
        out
    }

    pub fn select_rows(&self, idx: &[usize]) -> ZMatrix {
        ZMatrix::from_rows(idx.iter().map(|&i| self.rows[i].clone()).collect(), self.ncols)
    }

    pub fn select_cols(&self, idx: &[usize]) -> ZMatrix {
        ZMatrix::from_rows(
            self.rows
                .iter()
                .map(|r| idx.iter().map(|&j| r[j].clone()).collect())
                .collect(),
            idx.len(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(Zero::is_zero))
    }

    /// Converts back to `i64`, or `None` if an entry does not fit.
    pub fn to_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    fn sub_row_multiple(&mut self, target: usize, source: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let src = self.rows[source].clone();
        for (t, s) in self.rows[target].iter_mut().zip(src.iter()) {
            *t -= q * s;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in self.rows[i].iter_mut() {
            *x = -&*x;
        }
    }

    /// Row-style Hermite normal form: pivots positive, entries above each
    /// pivot reduced into `[0, pivot)`.
    pub fn hermite(&self) -> Hermite {
        let mut h = self.clone();
        let mut u = ZMatrix::identity(self.nrows);
        let mut pivots = Vec::new();
        let mut pr = 0;
        for col in 0..self.ncols {
            if pr == self.nrows {
                break;
            }
            loop {
                let best = (pr..self.nrows)
                    .filter(|&r| !h.rows[r][col].is_zero())
                    .min_by(|&a, &b| h.rows[a][col].abs().cmp(&h.rows[b][col].abs()));
                let Some(best) = best else { break };
                h.rows.swap(pr, best);
                u.rows.swap(pr, best);
                let mut clean = true;
                for r in pr + 1..self.nrows {
                    if h.rows[r][col].is_zero() {
                        continue;
                    }
                    let q = h.rows[r][col].div_floor(&h.rows[pr][col]);
                    h.sub_row_multiple(r, pr, &q);
                    u.sub_row_multiple(r, pr, &q);
                    if !h.rows[r][col].is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if h.rows[pr][col].is_zero() {
                continue;
            }
            if h.rows[pr][col].is_negative() {
                h.negate_row(pr);
                u.negate_row(pr);
            }
            for r in 0..pr {
                let q = h.rows[r][col].div_floor(&h.rows[pr][col]);
                h.sub_row_multiple(r, pr, &q);
                u.sub_row_multiple(r, pr, &q);
            }
            pivots.push(col);
            pr += 1;
        }
        Hermite { h, u, pivots }
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.hermite().rank()
    }

    /// A basis (in Hermite normal form) of the saturated lattice
    /// `{ v : v * M = 0 }`.
    pub fn left_kernel(&self) -> ZMatrix {
        let hnf = self.hermite();
        let r = hnf.rank();
        let idx: Vec<usize> = (r..self.nrows).collect();
        let basis = hnf.u.select_rows(&idx);
        if basis.nrows() == 0 {
            return basis;
        }
        basis.hermite().h.select_rows(&(0..basis.nrows()).collect::<Vec<_>>())
    }

    /// A basis of `{ c : M * c = 0 }`, one vector per row.
    pub fn right_kernel(&self) -> ZMatrix {
        self.transpose().left_kernel()
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.nrows, self.ncols, "determinant of a non-square matrix");
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.rows.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if m[k][k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return BigInt::zero();
                };
                m.swap(k, swap);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = v / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        sign * &m[n - 1][n - 1]
    }

    /// Diagonal of the Smith normal form (nonzero invariant factors only),
    /// each dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let mut a = self.rows.clone();
        let (r, c) = (self.nrows, self.ncols);
        let mut factors = Vec::new();
        for t in 0..r.min(c) {
            loop {
                let mut best: Option<(usize, usize)> = None;
                for i in t..r {
                    for j in t..c {
                        if a[i][j].is_zero() {
                            continue;
                        }
                        if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                            best = Some((i, j));
                        }
                    }
                }
                let Some((bi, bj)) = best else {
                    return factors;
                };
                a.swap(t, bi);
                for row in a.iter_mut() {
                    row.swap(t, bj);
                }
                let mut clean = true;
                for i in t + 1..r {
                    let q = a[i][t].div_floor(&a[t][t]);
                    if q.is_zero() && a[i][t].is_zero() {
                        continue;
                    }
                    let src = a[t].clone();
                    for (x, s) in a[i].iter_mut().zip(src.iter()) {
                        *x -= &q * s;
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..c {
                    let q = a[t][j].div_floor(&a[t][t]);
                    if q.is_zero() && a[t][j].is_zero() {
                        continue;
                    }
                    for row in a.iter_mut() {
                        let s = row[t].clone();
                        row[j] -= &q * s;
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
                if !clean {
                    continue;
                }
                let pivot = a[t][t].clone();
                let offender = (t + 1..r)
                    .find(|&i| (t + 1..c).any(|j| !a[i][j].is_multiple_of(&pivot)));
                match offender {
                    Some(i) => {
                        let src = a[i].clone();
                        for (x, s) in a[t].iter_mut().zip(src.iter()) {
                            *x += s;
                        }
                    }
                    None => break,
                }
            }
            factors.push(a[t][t].abs());
        }
        factors
    }

    /// Whether `target` lies in the integer row span of `self`.
    pub fn row_span_contains(&self, target: &[BigInt]) -> bool {
        assert_eq!(target.len(), self.ncols);
        let hnf = self.hermite();
        let mut t = target.to_vec();
        let mut next = 0;
        for col in 0..self.ncols {
            if next < hnf.pivots.len() && hnf.pivots[next] == col {
                let row = hnf.h.row(next);
                let (q, rem) = t[col].div_rem(&row[col]);
                if !rem.is_zero() {
                    return false;
                }
                for (x, y) in t.iter_mut().zip(row.iter()) {
                    *x -= &q * y;
                }
                next += 1;
            } else if !t[col].is_zero() {
                return false;
            }
        }
        true
    }
}

/// Solves the square system `M x = b` over the rationals; `None` if `M` is
/// singular.
pub fn solve_rational(m: &ZMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    assert_eq!(n, b.len());
    let mut aug: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut row: Vec<BigRational> = m
                .row(i)
                .iter()
                .map(|x| BigRational::from_integer(x.clone()))
                .collect();
            row.push(BigRational::from_integer(b[i].clone()));
            row
        })
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&r| !aug[r][k].is_zero())?;
        aug.swap(k, piv);
        let inv = aug[k][k].recip();
        for x in aug[k].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r == k || aug[r][k].is_zero() {
                continue;
            }
            let f = aug[r][k].clone();
            let src = aug[k].clone();
            for (x, s) in aug[r].iter_mut().zip(src.iter()) {
                *x -= &f * s;
            }
        }
    }
    Some(aug.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> ZMatrix {
        let v: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        let ncols = v.first().map_or(0, Vec::len);
        ZMatrix::from_i64(&v, ncols)
    }

    #[test]
    fn hermite_is_unimodular_transform() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let hnf = a.hermite();
        assert_eq!(hnf.u.mul(&a), hnf.h);
        assert!(hnf.u.det().abs().is_one());
        assert_eq!(hnf.rank(), 3);
    }

    #[test]
    fn kernel_of_diagonal_weight() {
        let a = m(&[&[1], &[1]]);
        assert_eq!(a.left_kernel(), m(&[&[1, -1]]));
    }

    #[test]
    fn smith_of_torsion_matrix() {
        let a = m(&[&[2, 0], &[0, 4], &[0, 0]]);
        assert_eq!(a.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
        let b = m(&[&[2, 4], &[6, 8]]);
        // det = -8, gcd of entries 2
        assert_eq!(b.invariant_factors(), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn bareiss_det() {
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), BigInt::from(-1));
        assert_eq!(m(&[&[2, 3, 1], &[4, 1, -3], &[1, 2, 2]]).det(), BigInt::from(-10));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), BigInt::zero());
    }

    #[test]
    fn span_membership() {
        let g = m(&[&[2, 0], &[0, 3]]);
        assert!(g.row_span_contains(&[BigInt::from(4), BigInt::from(-3)]));
        assert!(!g.row_span_contains(&[BigInt::from(1), BigInt::from(0)]));
        let empty = ZMatrix::zeros(0, 2);
        assert!(empty.row_span_contains(&[BigInt::zero(), BigInt::zero()]));
        assert!(!empty.row_span_contains(&[BigInt::one(), BigInt::zero()]));
    }

    #[test]
    fn rational_solve() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve_rational(&a, &[BigInt::from(1), BigInt::from(0)]).unwrap();
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        assert_eq!(x, vec![half.clone(), half]);
        assert!(solve_rational(&m(&[&[1, 2], &[2, 4]]), &[BigInt::one(), BigInt::one()]).is_none());
    }
}
