//! Exact integer and rational linear algebra.
//!
//! Everything here runs on arbitrary-precision integers: intersection
//! matrices are small, but determinants and intermediate entries of the
//! normal-form eliminations grow without any useful a priori bound.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Build a rational from two machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// Dense matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type RatMatrix = Matrix<Rational>;

impl<T: Clone> Matrix<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "entry count must equal rows * cols"
        );
        Matrix { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }
}

impl<T: Clone + PartialEq> Matrix<T> {
    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + One,
{
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                entries[i].clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self.get(i, k).clone() * other.get(k, j).clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }
}

impl IntMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rational::from_integer(x.clone()))
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x)
    }

    /// Determinant by fraction-free (Bareiss) elimination with row pivoting.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                    Some(p) => {
                        m.swap_rows(k, p);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                    m.set(i, j, v);
                }
            }
            prev = m.get(k, k).clone();
        }
        sign * m.get(n - 1, n - 1)
    }
}

impl RatMatrix {
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        IntMatrix::from_i64_rows(rows).to_rational()
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Exact inverse by Gauss-Jordan elimination over the rationals.
pub fn invert_rational_matrix(a: &RatMatrix) -> Result<RatMatrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut inv = RatMatrix::identity(n);
    for c in 0..n {
        let pivot = (c..n)
            .find(|&r| !m.get(r, c).is_zero())
            .ok_or(Error::SingularMatrix)?;
        m.swap_rows(c, pivot);
        inv.swap_rows(c, pivot);
        let p = m.get(c, c).recip();
        for j in 0..n {
            let v = m.get(c, j) * &p;
            m.set(c, j, v);
            let v = inv.get(c, j) * &p;
            inv.set(c, j, v);
        }
        for r in 0..n {
            if r == c || m.get(r, c).is_zero() {
                continue;
            }
            let f = m.get(r, c).clone();
            for j in 0..n {
                let v = m.get(r, j) - &f * m.get(c, j);
                m.set(r, j, v);
                let v = inv.get(r, j) - &f * inv.get(c, j);
                inv.set(r, j, v);
            }
        }
    }
    Ok(inv)
}

/// `u * a * v == s`, with `s` diagonal, nonnegative and `s[0] | s[1] | ...`.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }
}

/// `u * a == h`, with `h` in row-style Hermite normal form.
#[derive(Clone, Debug)]
pub struct HnfResult {
    pub u: IntMatrix,
    pub h: IntMatrix,
}

impl HnfResult {
    /// Pivot entries of `h`, in row order.
    pub fn pivots(&self) -> Vec<BigInt> {
        (0..self.h.rows())
            .filter_map(|i| self.h.row(i).iter().find(|x| !x.is_zero()).cloned())
            .collect()
    }
}

// Row and column operations that keep the transformation matrices in sync.
struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    // row[target] -= q * row[src]
    fn sub_row(&mut self, target: usize, src: usize, q: &BigInt) {
        for j in 0..self.a.cols() {
            let d = q * self.a.get(src, j);
            *self.a.get_mut(target, j) -= d;
        }
        for j in 0..self.u.cols() {
            let d = q * self.u.get(src, j);
            *self.u.get_mut(target, j) -= d;
        }
    }

    // col[target] -= q * col[src]
    fn sub_col(&mut self, target: usize, src: usize, q: &BigInt) {
        for i in 0..self.a.rows() {
            let d = q * self.a.get(i, src);
            *self.a.get_mut(i, target) -= d;
        }
        for i in 0..self.v.rows() {
            let d = q * self.v.get(i, src);
            *self.v.get_mut(i, target) -= d;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.a.cols() {
            let x = -self.a.get(i, j);
            self.a.set(i, j, x);
        }
        for j in 0..self.u.cols() {
            let x = -self.u.get(i, j);
            self.u.set(i, j, x);
        }
    }
}

/// Smith normal form by classical elimination.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.clone(),
        u: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
    };
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = smallest_nonzero(&r.a, t) else {
            break;
        };
        r.swap_rows(t, pi);
        r.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if r.a.get(i, t).is_zero() {
                    continue;
                }
                let q = r.a.get(i, t).div_floor(r.a.get(t, t));
                r.sub_row(i, t, &q);
                if !r.a.get(i, t).is_zero() {
                    r.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if r.a.get(t, j).is_zero() {
                    continue;
                }
                let q = r.a.get(t, j).div_floor(r.a.get(t, t));
                r.sub_col(j, t, &q);
                if !r.a.get(t, j).is_zero() {
                    r.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // row and column are clear; enforce divisibility of the trailing block
            let pivot = r.a.get(t, t).clone();
            let offender =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !r.a.get(i, j).is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    // row[t] += row[i] brings a non-multiple into the pivot row
                    r.sub_row(t, i, &-BigInt::one());
                }
                None => break,
            }
        }
        if r.a.get(t, t).is_negative() {
            r.negate_row(t);
        }
    }
    SnfResult {
        u: r.u,
        s: r.a,
        v: r.v,
    }
}

fn smallest_nonzero(a: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..a.rows() {
        for j in t..a.cols() {
            let x = a.get(i, j);
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Row-style Hermite normal form of a matrix with full row rank.
pub fn hermite_normal_form(a: &IntMatrix) -> Result<HnfResult> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.clone(),
        u: IntMatrix::identity(m),
        v: IntMatrix::identity(0),
    };
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        // Euclid on the column below `row`
        loop {
            let pivot = (row..m)
                .filter(|&i| !r.a.get(i, col).is_zero())
                .min_by(|&x, &y| r.a.get(x, col).abs().cmp(&r.a.get(y, col).abs()));
            let Some(p) = pivot else { break };
            r.swap_rows(row, p);
            let mut done = true;
            for i in row + 1..m {
                if r.a.get(i, col).is_zero() {
                    continue;
                }
                let q = r.a.get(i, col).div_floor(r.a.get(row, col));
                r.sub_row(i, row, &q);
                if !r.a.get(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r.a.get(row, col).is_zero() {
            continue;
        }
        if r.a.get(row, col).is_negative() {
            r.negate_row(row);
        }
        let pivot = r.a.get(row, col).clone();
        for i in 0..row {
            let q = r.a.get(i, col).div_floor(&pivot);
            if !q.is_zero() {
                r.sub_row(i, row, &q);
            }
        }
        row += 1;
    }
    if row < m {
        return Err(Error::RankDeficient { rank: row, rows: m });
    }
    Ok(HnfResult { u: r.u, h: r.a })
}

/// True iff every leading principal minor of `-a` is positive.
pub fn is_negative_definite(a: &IntMatrix) -> Result<bool> {
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    // Bareiss without pivoting: after step k the (k,k) entry is the
    // leading principal minor of order k+1.
    let n = a.rows();
    let mut m = a.neg();
    let mut prev = BigInt::one();
    for k in 0..n {
        if !m.get(k, k).is_positive() {
            return Ok(false);
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (m.get(i, j) * m.get(k, k) - m.get(i, k) * m.get(k, j)) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    Ok(true)
}

pub fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a2() -> IntMatrix {
        IntMatrix::from_i64_rows(&[vec![-2, 1], vec![1, -2]])
    }

    fn is_unimodular(m: &IntMatrix) -> bool {
        m.determinant().abs().is_one()
    }

    fn check_snf(a: &IntMatrix) {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
        assert!(is_unimodular(&snf.u) && is_unimodular(&snf.v));
        for i in 0..snf.s.rows() {
            for j in 0..snf.s.cols() {
                if i != j {
                    assert!(snf.s.get(i, j).is_zero());
                }
            }
        }
        let d = snf.diagonal();
        assert!(d.iter().all(|x| !x.is_negative()));
        for w in d.windows(2) {
            if w[0].is_zero() {
                assert!(w[1].is_zero());
            } else {
                assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn invert_a2() {
        let a = a2().to_rational();
        let inv = invert_rational_matrix(&a).unwrap();
        let expected =
            RatMatrix::from_fn(2, 2, |i, j| if i == j { rat(-2, 3) } else { rat(-1, 3) });
        assert_eq!(inv, expected);
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
    }

    #[test]
    fn invert_identity_and_singular() {
        let id = RatMatrix::identity(3);
        assert_eq!(invert_rational_matrix(&id).unwrap(), id);
        let sing = RatMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(matches!(
            invert_rational_matrix(&sing),
            Err(Error::SingularMatrix)
        ));
    }

    #[test]
    fn snf_small_cases() {
        assert_eq!(
            smith_normal_form(&a2()).diagonal(),
            vec![BigInt::from(1), BigInt::from(3)]
        );
        let d = IntMatrix::diagonal(&[BigInt::from(2), BigInt::from(6)]);
        assert_eq!(
            smith_normal_form(&d).diagonal(),
            vec![BigInt::from(2), BigInt::from(6)]
        );
        // diag(6, 4) is not in normal form: 6 does not divide 4
        let d = IntMatrix::diagonal(&[BigInt::from(6), BigInt::from(4)]);
        let snf = smith_normal_form(&d);
        assert_eq!(snf.diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
        check_snf(&d);
    }

    #[test]
    fn snf_rectangular_and_zero() {
        check_snf(&IntMatrix::from_i64_rows(&[vec![2, 4, 4], vec![-6, 6, 12]]));
        check_snf(&IntMatrix::from_i64_rows(&[
            vec![0, 0],
            vec![0, 0],
            vec![0, 3],
        ]));
    }

    #[test]
    fn hnf_small_cases() {
        let h = hermite_normal_form(&a2()).unwrap();
        assert_eq!(h.h, IntMatrix::from_i64_rows(&[vec![1, 1], vec![0, 3]]));
        assert_eq!(h.u.mul(&a2()), h.h);
        let id = IntMatrix::identity(2);
        assert_eq!(hermite_normal_form(&id).unwrap().h, id);
        let def = IntMatrix::from_i64_rows(&[vec![1, 2], vec![2, 4]]);
        assert!(matches!(
            hermite_normal_form(&def),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn negative_definiteness() {
        assert!(is_negative_definite(&a2()).unwrap());
        assert!(
            !is_negative_definite(&IntMatrix::from_i64_rows(&[vec![-1, 2], vec![2, -1]])).unwrap()
        );
        assert!(is_negative_definite(&IntMatrix::from_i64_rows(&[vec![-1]])).unwrap());
        let asym = IntMatrix::from_i64_rows(&[vec![-2, 1], vec![0, -2]]);
        assert!(matches!(
            is_negative_definite(&asym),
            Err(Error::NotSymmetric)
        ));
    }

    #[test]
    fn determinant_matches_hand_values() {
        assert_eq!(a2().determinant(), BigInt::from(3));
        let m = IntMatrix::from_i64_rows(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 9]]);
        // 0*(36-35) - 1*(27-30) + 2*(21-24) = -3
        assert_eq!(m.determinant(), BigInt::from(-3));
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| {
            prop::collection::vec(-9i64..10, r * c).prop_map(move |v| {
                IntMatrix::from_vec(r, c, v.into_iter().map(BigInt::from).collect())
            })
        })
    }

    fn small_square() -> impl Strategy<Value = IntMatrix> {
        (1usize..5).prop_flat_map(|n| {
            prop::collection::vec(-9i64..10, n * n).prop_map(move |v| {
                IntMatrix::from_vec(n, n, v.into_iter().map(BigInt::from).collect())
            })
        })
    }

    proptest! {
        #[test]
        fn snf_invariants(a in small_matrix()) {
            check_snf(&a);
        }

        #[test]
        fn inverse_is_exact(a in small_square()) {
            let r = a.to_rational();
            match invert_rational_matrix(&r) {
                Ok(inv) => {
                    prop_assert_eq!(r.mul(&inv), RatMatrix::identity(a.rows()));
                    prop_assert_eq!(inv.mul(&r), RatMatrix::identity(a.rows()));
                }
                Err(_) => prop_assert!(a.determinant().is_zero()),
            }
        }

        #[test]
        fn hnf_and_snf_agree_on_determinant(a in small_square()) {
            let det = a.determinant();
            match hermite_normal_form(&a) {
                Ok(h) => {
                    prop_assert_eq!(h.u.mul(&a), h.h.clone());
                    prop_assert!(is_unimodular(&h.u));
                    let hp: BigInt = h.pivots().iter().product();
                    let sp: BigInt = smith_normal_form(&a).diagonal().iter().product();
                    prop_assert_eq!(hp.clone(), det.abs());
                    prop_assert_eq!(sp, det.abs());
                    // canonical: above-pivot entries reduced
                    let mut col = 0;
                    for i in 0..h.h.rows() {
                        while h.h.get(i, col).is_zero() { col += 1; }
                        let p = h.h.get(i, col).clone();
                        prop_assert!(p.is_positive());
                        for k in 0..i {
                            let x = h.h.get(k, col);
                            prop_assert!(!x.is_negative() && x < &p);
                        }
                    }
                }
                Err(_) => prop_assert!(det.is_zero()),
            }
        }
    }
}
