//! Dense linear algebra over a prime field `F_p`.
//!
//! Everything the homology code needs reduces to row reduction: ranks, kernels,
//! membership in a column span and bases of quotients `span(Z) / span(B)`.
//! Pivoting is deterministic (first nonzero entry, columns left to right), so
//! bases computed from the same input are identical across runs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// The field `F_p` for a prime `p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField::F2
    }
}

impl PrimeField {
    pub const F2: PrimeField = PrimeField { p: 2 };
    pub const F3: PrimeField = PrimeField { p: 3 };

    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn characteristic(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a % self.p != 0, "inverse of zero in F_{}", self.p);
        // Fermat: a^(p-2)
        let mut base = a as u64 % self.p as u64;
        let mut exp = self.p - 2;
        let mut acc = 1u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % self.p as u64;
            }
            base = base * base % self.p as u64;
            exp >>= 1;
        }
        acc as u32
    }

    #[inline]
    pub fn from_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Residue of a sign `±1`.
    #[inline]
    pub fn sign(self, negative: bool) -> u32 {
        if negative {
            self.p - 1
        } else {
            1 % self.p
        }
    }

    pub fn element(self, v: i64) -> FieldElement {
        FieldElement {
            value: self.from_i64(v),
            field: self,
        }
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A single element of `F_p`, carrying its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u32,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<FieldElement> {
        (self.value != 0).then(|| FieldElement {
            value: self.field.inv(self.value),
            field: self.field,
        })
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! field_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                assert_eq!(self.field, rhs.field, "mixed characteristics");
                FieldElement {
                    value: self.field.$method(self.value, rhs.value),
                    field: self.field,
                }
            }
        }
    };
}

field_binop!(Add, add);
field_binop!(Sub, sub);
field_binop!(Mul, mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over F_{}", self.rows, self.cols, self.field.p)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl FMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FMatrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing entries mod `p`.
    pub fn from_rows<R: AsRef<[i64]>>(field: PrimeField, rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&v| field.from_i64(v)));
        }
        Ok(FMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a `rows x columns.len()` matrix from column vectors of residues.
    pub fn from_columns(field: PrimeField, rows: usize, columns: &[Vec<u32>]) -> Result<Self> {
        let mut m = FMatrix::zeros(field, rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (r, &v) in col.iter().enumerate() {
                m.data[r * m.cols + c] = v % field.p;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.field.p;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = FMatrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, rhs: &FMatrix) -> Result<FMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: rhs.rows,
            });
        }
        let f = self.field;
        let mut out = FMatrix::zeros(f, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                let src = rhs.row(k);
                let dst = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(src) {
                    if b != 0 {
                        *d = f.add(*d, f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        let f = self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(&a, &b)| a != 0 && b != 0)
                    .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect())
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &FMatrix) -> Result<FMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: rhs.rows,
            });
        }
        let cols = self.cols + rhs.cols;
        let mut out = FMatrix::zeros(self.field, self.rows, cols);
        for r in 0..self.rows {
            out.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
            out.data[r * cols + self.cols..(r + 1) * cols].copy_from_slice(rhs.row(r));
        }
        Ok(out)
    }

    /// Reduced row echelon form, pivoting only within the first `limit` columns.
    fn rref_in_place(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..limit.min(cols) {
            if prow == self.rows {
                break;
            }
            let Some(r) = (prow..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if r != prow {
                for k in 0..cols {
                    self.data.swap(r * cols + k, prow * cols + k);
                }
            }
            let inv = f.inv(self.data[prow * cols + c]);
            if inv != 1 {
                for v in &mut self.data[prow * cols..(prow + 1) * cols] {
                    *v = f.mul(*v, inv);
                }
            }
            let pivot_row: Vec<u32> = self.data[prow * cols..(prow + 1) * cols].to_vec();
            for r2 in 0..self.rows {
                if r2 == prow {
                    continue;
                }
                let factor = self.data[r2 * cols + c];
                if factor == 0 {
                    continue;
                }
                let row = &mut self.data[r2 * cols..(r2 + 1) * cols];
                for (v, &p) in row.iter_mut().zip(&pivot_row) {
                    if p != 0 {
                        *v = f.sub(*v, f.mul(factor, p));
                    }
                }
            }
            pivots.push(c);
            prow += 1;
        }
        pivots
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place(self.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// A basis of `{x : Ax = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0; self.cols];
                v[free] = 1;
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = f.neg(r.get(k, free));
                }
                v
            })
            .collect()
    }

    /// Coefficients `c` with `self * c = v`, or `None` when `v` is outside the column span.
    pub fn solve_in_span(&self, v: &[u32]) -> Result<Option<Vec<u32>>> {
        SpanSolver::new(self).solve(v)
    }
}

/// Precomputed row reduction of a fixed matrix `A`, for repeated solves of `A c = v`.
#[derive(Clone, Debug)]
pub struct SpanSolver {
    field: PrimeField,
    cols: usize,
    /// Row operations `T` with `T A` in reduced echelon form.
    transform: FMatrix,
    pivots: Vec<usize>,
}

impl SpanSolver {
    pub fn new(a: &FMatrix) -> Self {
        let n = a.rows;
        let mut aug = a
            .hstack(&FMatrix::identity(a.field, n))
            .expect("identity has matching rows");
        let pivots = aug.rref_in_place(a.cols);
        let mut transform = FMatrix::zeros(a.field, n, n);
        for r in 0..n {
            transform.data[r * n..(r + 1) * n].copy_from_slice(&aug.row(r)[a.cols..]);
        }
        SpanSolver {
            field: a.field,
            cols: a.cols,
            transform,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, v: &[u32]) -> Result<Option<Vec<u32>>> {
        let w = self.transform.mul_vec(v)?;
        let rank = self.pivots.len();
        if w[rank..].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        let mut c = vec![0; self.cols];
        for (k, &p) in self.pivots.iter().enumerate() {
            c[p] = w[k] % self.field.p;
        }
        Ok(Some(c))
    }
}

/// A basis of `span(Z) / span(B)` together with the projection onto it.
#[derive(Clone, Debug)]
pub struct Quotient {
    ambient: usize,
    reps: FMatrix,
    boundary_rank: usize,
    solver: SpanSolver,
}

impl Quotient {
    /// Dimension of the ambient coordinate space.
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.reps.cols
    }

    /// Representatives, one column per quotient basis class.
    pub fn representatives(&self) -> &FMatrix {
        &self.reps
    }

    /// Coordinates of the class of `v` (which must lie in `span(Z)`).
    pub fn project(&self, v: &[u32]) -> Result<Vec<u32>> {
        match self.solver.solve(v)? {
            Some(c) => Ok(c[self.boundary_rank..].to_vec()),
            None => Err(Error::NotInSpan),
        }
    }
}

/// Representatives of a basis of `span(Z) / span(Bd)`.
///
/// The columns of `[Bd | Z]` are scanned left to right; independent columns of
/// `Bd` span the boundaries, and the independent columns of `Z` beyond them are
/// the representatives.
pub fn quotient_basis(z: &FMatrix, bd: &FMatrix) -> Result<Quotient> {
    if z.rows != bd.rows {
        return Err(Error::DimensionMismatch {
            expected: z.rows,
            found: bd.rows,
        });
    }
    let joint = bd.hstack(z)?;
    let (_, pivots) = joint.rref();
    if pivots.len() != z.rank() {
        return Err(Error::BoundaryNotInCycles);
    }
    let boundary_cols: Vec<usize> = pivots.iter().copied().filter(|&c| c < bd.cols).collect();
    let rep_cols: Vec<usize> = pivots
        .iter()
        .copied()
        .filter(|&c| c >= bd.cols)
        .map(|c| c - bd.cols)
        .collect();
    let boundary_rank = boundary_cols.len();
    let reps = select_columns(z, &rep_cols);
    let basis = select_columns(bd, &boundary_cols).hstack(&reps)?;
    Ok(Quotient {
        ambient: z.rows,
        reps,
        boundary_rank,
        solver: SpanSolver::new(&basis),
    })
}

fn select_columns(m: &FMatrix, cols: &[usize]) -> FMatrix {
    let mut out = FMatrix::zeros(m.field, m.rows, cols.len());
    for r in 0..m.rows {
        for (k, &c) in cols.iter().enumerate() {
            out.data[r * cols.len() + k] = m.get(r, c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(field: PrimeField, rows: &[&[i64]]) -> FMatrix {
        FMatrix::from_rows(field, rows).unwrap()
    }

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(5).unwrap();
        assert_eq!(f.inv(2), 3);
        assert_eq!(f.from_i64(-1), 4);
        let a = f.element(3);
        let b = f.element(4);
        assert_eq!((a * b).value(), 2);
        assert_eq!((a + b).value(), 2);
        assert_eq!((a - b).value(), 4);
        assert_eq!((-a).value(), 2);
        assert_eq!(a.inv().unwrap().value(), 2);
        assert!(f.element(0).inv().is_none());
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(1).is_err());
    }

    #[test]
    fn rank_examples() {
        let f2 = PrimeField::F2;
        assert_eq!(FMatrix::identity(f2, 3).rank(), 3);
        assert_eq!(FMatrix::zeros(f2, 2, 2).rank(), 0);
        assert_eq!(m(f2, &[&[1, 1], &[1, 1]]).rank(), 1);
        // over F_2 this is singular, over F_3 it is not
        let a = [[1i64, 1], [1, -1]];
        assert_eq!(m(f2, &[&a[0], &a[1]]).rank(), 1);
        assert_eq!(m(PrimeField::F3, &[&a[0], &a[1]]).rank(), 2);
    }

    #[test]
    fn kernel_examples() {
        let f2 = PrimeField::F2;
        assert!(FMatrix::identity(f2, 3).kernel_basis().is_empty());
        assert_eq!(FMatrix::zeros(f2, 2, 2).kernel_basis(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(m(f2, &[&[1, 1]]).kernel_basis(), vec![vec![1, 1]]);
    }

    #[test]
    fn solve_examples() {
        let f2 = PrimeField::F2;
        let id = FMatrix::identity(f2, 3);
        assert_eq!(id.solve_in_span(&[1, 0, 1]).unwrap(), Some(vec![1, 0, 1]));
        let b = m(f2, &[&[1], &[1]]);
        assert_eq!(b.solve_in_span(&[1, 0]).unwrap(), None);
        assert_eq!(b.solve_in_span(&[1, 1]).unwrap(), Some(vec![1]));
        let empty = FMatrix::zeros(f2, 2, 0);
        assert_eq!(empty.solve_in_span(&[0, 0]).unwrap(), Some(vec![]));
        assert!(matches!(
            b.solve_in_span(&[1, 1, 1]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn quotient_examples() {
        let f2 = PrimeField::F2;
        let id = FMatrix::identity(f2, 2);
        let none = FMatrix::zeros(f2, 2, 0);
        assert_eq!(quotient_basis(&id, &none).unwrap().dim(), 2);
        assert_eq!(quotient_basis(&id, &id).unwrap().dim(), 0);

        let z = m(f2, &[&[1, 0], &[0, 1], &[0, 0]]);
        let bd = m(f2, &[&[1], &[1], &[0]]);
        let q = quotient_basis(&z, &bd).unwrap();
        assert_eq!(q.dim(), 1);
        // (1,1,0) is a boundary, so its class is zero
        assert_eq!(q.project(&[1, 1, 0]).unwrap(), vec![0]);
        assert_eq!(q.project(&[1, 0, 0]).unwrap(), vec![1]);
        assert_eq!(q.project(&[0, 0, 1]), Err(Error::NotInSpan));

        let outside = m(f2, &[&[0], &[0], &[1]]);
        assert_eq!(quotient_basis(&z, &outside).unwrap_err(), Error::BoundaryNotInCycles);
    }

    fn arb_matrix() -> impl Strategy<Value = FMatrix> {
        (prop::sample::select(vec![2u32, 3, 5]), 0usize..6, 0usize..6).prop_flat_map(
            |(p, rows, cols)| {
                prop::collection::vec(0..p, rows * cols).prop_map(move |data| {
                    let f = PrimeField::new(p).unwrap();
                    let mut a = FMatrix::zeros(f, rows, cols);
                    for r in 0..rows {
                        for c in 0..cols {
                            a.set(r, c, data[r * cols + c]);
                        }
                    }
                    a
                })
            },
        )
    }

    proptest! {
        #[test]
        fn rank_of_transpose(a in arb_matrix()) {
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn rank_nullity(a in arb_matrix()) {
            let ker = a.kernel_basis();
            prop_assert_eq!(ker.len() + a.rank(), a.cols());
            for v in &ker {
                prop_assert!(a.mul_vec(v).unwrap().iter().all(|&x| x == 0));
            }
        }

        #[test]
        fn quotient_dimension(a in arb_matrix(), b in arb_matrix()) {
            // Z = [A | B'], Bd = A guarantees containment
            if a.rows() == b.rows() && a.field() == b.field() {
                let z = a.hstack(&b).unwrap();
                let q = quotient_basis(&z, &a).unwrap();
                prop_assert_eq!(q.dim(), z.rank() - a.rank());
            }
        }

        #[test]
        fn solve_roundtrip(a in arb_matrix(), seed in any::<u64>()) {
            let f = a.field();
            let c: Vec<u32> = (0..a.cols())
                .map(|k| ((seed >> (k % 60)) as u32) % f.characteristic())
                .collect();
            let v = a.mul_vec(&c).unwrap();
            let sol = a.solve_in_span(&v).unwrap().expect("in span by construction");
            prop_assert_eq!(a.mul_vec(&sol).unwrap(), v);
        }
    }
}
