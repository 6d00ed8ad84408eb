//! Dense linear algebra over any field of a [`Tower`].
//!
//! Matrices store element encodings of GF(q²) together with the order of the
//! field the entries belong to. Elimination picks a backend from that order:
//! bit-packed rows over GF(2), plain modular arithmetic over a prime field
//! GF(p) (whose encodings are `0..p`), and the tower's log tables otherwise.
//! All backends produce the same reduced row echelon form.
//!
//! Every elimination routine takes an optional column order. The reduced row
//! echelon form relative to a fixed column order is unique, so two row spaces
//! can be compared under any order, as long as it is the same order for both.
//! Choosing an order that starts with a known information set turns the
//! dense parts of the big subcode computations into small blocks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Tower, TowerInfo};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrices live over different fields: GF({0}) and GF({1})")]
    FieldMismatch(u32, u32),
    #[error("column counts differ: {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("column order is not a permutation of 0..{0}")]
    BadColumnOrder(usize),
    #[error("entry {value} at ({row}, {col}) is not in GF({order})")]
    EntryNotInField {
        row: usize,
        col: usize,
        value: u16,
        order: u32,
    },
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        got: usize,
        expected: usize,
    },
}

/// Dense row-major matrix over the subfield GF(`order`) of a tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    order: u32,
    rows: usize,
    cols: usize,
    data: Vec<u16>,
}

impl Matrix {
    pub fn zeros(order: u32, rows: usize, cols: usize) -> Self {
        Matrix {
            order,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(order: u32, n: usize) -> Self {
        let mut m = Self::zeros(order, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows without checking field membership.
    pub fn from_rows(order: u32, cols: usize, rows: &[Vec<u16>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix {
            order,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix from rows, checking shape and that every entry lies in GF(`order`).
    pub fn from_rows_checked(
        tower: &Tower,
        order: u32,
        cols: usize,
        rows: &[Vec<u16>],
    ) -> Result<Self, LinalgError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(LinalgError::RaggedRows {
                    row: i,
                    got: row.len(),
                    expected: cols,
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if value as u32 >= tower.q2() || !tower.in_subfield(value, order) {
                    return Err(LinalgError::EntryNotInField {
                        row: i,
                        col: j,
                        value,
                        order,
                    });
                }
            }
        }
        Ok(Self::from_rows(order, cols, rows))
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u16 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u16) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u16] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u16] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u16]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn push_row(&mut self, row: &[u16]) {
        assert_eq!(row.len(), self.cols, "row length");
        self.data.extend_from_slice(row);
        self.rows += 1;
    }

    /// Appends the rows of `other`, which must have the same shape and field.
    pub fn stack(&mut self, other: &Matrix) {
        assert_eq!(self.cols, other.cols);
        assert_eq!(self.order, other.order);
        self.data.extend_from_slice(&other.data);
        self.rows += other.rows;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.order, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Reinterprets the entries as elements of a larger field (no data change).
    pub fn embedded(&self, order: u32) -> Matrix {
        Matrix {
            order,
            ..self.clone()
        }
    }

    /// `M · vᵀ`.
    pub fn mul_vec(&self, tower: &Tower, v: &[u16]) -> Vec<u16> {
        assert_eq!(v.len(), self.cols);
        self.iter_rows().map(|row| dot(tower, row, v)).collect()
    }

    /// Plain-text export: one row per line, entries as space-separated encodings.
    pub fn write_text<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for row in self.iter_rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn sidecar(&self, tower: &Tower) -> MatrixSidecar {
        MatrixSidecar {
            field_order: self.order,
            rows: self.rows,
            cols: self.cols,
            tower: tower.info(),
        }
    }
}

/// JSON metadata written next to a plain-text matrix export.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub field_order: u32,
    pub rows: usize,
    pub cols: usize,
    pub tower: TowerInfo,
}

pub fn dot(tower: &Tower, a: &[u16], b: &[u16]) -> u16 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| tower.add(acc, tower.mul(x, y)))
}

/// Reduced row echelon form: `rank` nonzero rows, row `i` has a leading one in
/// column `pivots[i]` and zeros in every other pivot column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Echelon {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    /// Columns that carry no pivot, in increasing order.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.cols()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols()).filter(|&c| !is_pivot[c]).collect()
    }
}

/// Elimination backend. [`Backend::Auto`] picks the fastest one valid for the
/// matrix field; the others exist so the paths can be checked against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Auto,
    /// Log-table arithmetic of the tower; valid for every field.
    Tables,
    /// Arithmetic modulo `p`; valid for the prime field only.
    Prime,
    /// Bit-packed rows; valid for GF(2) only.
    Bits,
}

pub fn rref(tower: &Tower, m: &Matrix) -> Echelon {
    rref_with(tower, m, None, Backend::Auto).expect("identity column order")
}

pub fn rref_in_order(tower: &Tower, m: &Matrix, order: &[usize]) -> Result<Echelon, LinalgError> {
    rref_with(tower, m, Some(order), Backend::Auto)
}

/// Reduced row echelon form with respect to the column order `order`
/// (`order[0]` is the first column scanned for a pivot). The result is stored
/// in the original column positions.
pub fn rref_with(
    tower: &Tower,
    m: &Matrix,
    order: Option<&[usize]>,
    backend: Backend,
) -> Result<Echelon, LinalgError> {
    let cols = m.cols();
    if let Some(order) = order {
        check_permutation(order, cols)?;
    }
    let backend = match backend {
        Backend::Auto if m.order() == 2 && tower.p() == 2 => Backend::Bits,
        Backend::Auto if m.order() == tower.p() => Backend::Prime,
        Backend::Auto => Backend::Tables,
        b => b,
    };
    assert!(
        backend != Backend::Bits || m.order() == 2,
        "bit-packed backend needs GF(2)"
    );
    assert!(
        backend != Backend::Prime || m.order() == tower.p(),
        "modular backend needs the prime field"
    );

    let mut layout = Vec::with_capacity(m.rows() * cols);
    for row in m.iter_rows() {
        match order {
            Some(order) => layout.extend(order.iter().map(|&c| row[c])),
            None => layout.extend_from_slice(row),
        }
    }
    let rows = m.rows();
    let layout_pivots = match backend {
        Backend::Bits => gauss_jordan_bits(&mut layout, rows, cols),
        Backend::Prime => gauss_jordan(&PrimeOps::new(tower.p()), &mut layout, rows, cols),
        _ => gauss_jordan(&TableOps(tower), &mut layout, rows, cols),
    };

    let rank = layout_pivots.len();
    let mut out = Matrix::zeros(m.order(), rank, cols);
    for i in 0..rank {
        let src = &layout[i * cols..(i + 1) * cols];
        match order {
            Some(order) => {
                let dst = out.row_mut(i);
                for (j, &c) in order.iter().enumerate() {
                    dst[c] = src[j];
                }
            }
            None => out.row_mut(i).copy_from_slice(src),
        }
    }
    let pivots = match order {
        Some(order) => layout_pivots.iter().map(|&j| order[j]).collect(),
        None => layout_pivots,
    };
    Ok(Echelon {
        matrix: out,
        pivots,
    })
}

pub fn rank(tower: &Tower, m: &Matrix) -> usize {
    rref(tower, m).rank()
}

/// Rows spanning `{v : M·vᵀ = 0}`, one per free column of the echelon form:
/// `v` has a one in its free column and `-R[i][f]` in pivot column `i`.
pub fn kernel_from_echelon(tower: &Tower, ech: &Echelon) -> Matrix {
    let cols = ech.cols();
    let free = ech.free_columns();
    let mut k = Matrix::zeros(ech.matrix.order(), free.len(), cols);
    for (row, &f) in free.iter().enumerate() {
        k.set(row, f, 1);
        for (i, &p) in ech.pivots.iter().enumerate() {
            k.set(row, p, tower.neg(ech.matrix.get(i, f)));
        }
    }
    k
}

pub fn kernel_basis(tower: &Tower, m: &Matrix) -> Matrix {
    kernel_from_echelon(tower, &rref(tower, m))
}

/// Basis of the dual of the row space of `g`.
pub fn dual_basis(tower: &Tower, g: &Matrix) -> Matrix {
    kernel_basis(tower, g)
}

fn check_compatible(a: &Matrix, b: &Matrix) -> Result<(), LinalgError> {
    if a.order() != b.order() {
        return Err(LinalgError::FieldMismatch(a.order(), b.order()));
    }
    if a.cols() != b.cols() {
        return Err(LinalgError::DimensionMismatch(a.cols(), b.cols()));
    }
    Ok(())
}

pub fn row_space_equal(tower: &Tower, a: &Matrix, b: &Matrix) -> Result<bool, LinalgError> {
    check_compatible(a, b)?;
    Ok(rref(tower, a) == rref(tower, b))
}

/// Row-space equality, comparing canonical forms relative to `order`.
pub fn row_space_equal_in_order(
    tower: &Tower,
    a: &Matrix,
    b: &Matrix,
    order: &[usize],
) -> Result<bool, LinalgError> {
    check_compatible(a, b)?;
    Ok(rref_in_order(tower, a, order)? == rref_in_order(tower, b, order)?)
}

fn check_permutation(order: &[usize], cols: usize) -> Result<(), LinalgError> {
    if order.len() != cols {
        return Err(LinalgError::BadColumnOrder(cols));
    }
    let mut seen = vec![false; cols];
    for &c in order {
        if c >= cols || seen[c] {
            return Err(LinalgError::BadColumnOrder(cols));
        }
        seen[c] = true;
    }
    Ok(())
}

/// Reduced echelon basis grown one row at a time. Each inserted row is
/// reduced against the basis and, if independent, its pivot is cleared from
/// every earlier row, so the basis stays fully reduced (natural column order).
#[derive(Debug, Clone)]
pub struct EchelonBuilder<'t> {
    tower: &'t Tower,
    order: u32,
    cols: usize,
    rows: Vec<Vec<u16>>,
    pivots: Vec<usize>,
}

impl<'t> EchelonBuilder<'t> {
    pub fn new(tower: &'t Tower, order: u32, cols: usize) -> Self {
        EchelonBuilder {
            tower,
            order,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts a row; returns whether the rank increased.
    pub fn insert(&mut self, mut row: Vec<u16>) -> bool {
        assert_eq!(row.len(), self.cols, "row length");
        let ops = AnyOps::new(self.tower, self.order);
        for (basis, &p) in self.rows.iter().zip(&self.pivots) {
            let a = row[p];
            if a != 0 {
                ops.axpy(&mut row, ops.neg(a), basis);
            }
        }
        let Some(pivot) = row.iter().position(|&x| x != 0) else {
            return false;
        };
        let lead = row[pivot];
        if lead != 1 {
            ops.scale(&mut row[pivot..], ops.inv(lead));
        }
        for basis in self.rows.iter_mut() {
            let a = basis[pivot];
            if a != 0 {
                ops.axpy(&mut basis[pivot..], ops.neg(a), &row[pivot..]);
            }
        }
        self.rows.push(row);
        self.pivots.push(pivot);
        true
    }

    /// The canonical reduced row echelon form of everything inserted so far.
    pub fn echelon(&self) -> Echelon {
        let mut idx: Vec<usize> = (0..self.rows.len()).collect();
        idx.sort_by_key(|&i| self.pivots[i]);
        let mut matrix = Matrix::zeros(self.order, 0, self.cols);
        for &i in &idx {
            matrix.push_row(&self.rows[i]);
        }
        Echelon {
            matrix,
            pivots: idx.iter().map(|&i| self.pivots[i]).collect(),
        }
    }
}

enum AnyOps<'a> {
    Tables(TableOps<'a>),
    Prime(PrimeOps),
}

impl<'a> AnyOps<'a> {
    fn new(tower: &'a Tower, order: u32) -> Self {
        if order == tower.p() {
            AnyOps::Prime(PrimeOps::new(tower.p()))
        } else {
            AnyOps::Tables(TableOps(tower))
        }
    }
}

impl RowOps for AnyOps<'_> {
    fn inv(&self, a: u16) -> u16 {
        match self {
            AnyOps::Tables(o) => o.inv(a),
            AnyOps::Prime(o) => o.inv(a),
        }
    }

    fn neg(&self, a: u16) -> u16 {
        match self {
            AnyOps::Tables(o) => o.neg(a),
            AnyOps::Prime(o) => o.neg(a),
        }
    }

    fn scale(&self, row: &mut [u16], f: u16) {
        match self {
            AnyOps::Tables(o) => o.scale(row, f),
            AnyOps::Prime(o) => o.scale(row, f),
        }
    }

    fn axpy(&self, dst: &mut [u16], f: u16, src: &[u16]) {
        match self {
            AnyOps::Tables(o) => o.axpy(dst, f, src),
            AnyOps::Prime(o) => o.axpy(dst, f, src),
        }
    }
}

trait RowOps {
    fn inv(&self, a: u16) -> u16;
    fn neg(&self, a: u16) -> u16;
    fn scale(&self, row: &mut [u16], f: u16);
    /// `dst += f · src`
    fn axpy(&self, dst: &mut [u16], f: u16, src: &[u16]);
}

struct TableOps<'a>(&'a Tower);

impl RowOps for TableOps<'_> {
    fn inv(&self, a: u16) -> u16 {
        self.0.inv(a)
    }

    fn neg(&self, a: u16) -> u16 {
        self.0.neg(a)
    }

    fn scale(&self, row: &mut [u16], f: u16) {
        for x in row.iter_mut() {
            *x = self.0.mul(*x, f);
        }
    }

    fn axpy(&self, dst: &mut [u16], f: u16, src: &[u16]) {
        let t = self.0;
        if t.p() == 2 {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d ^= t.mul(f, s);
            }
        } else {
            for (d, &s) in dst.iter_mut().zip(src) {
                if s != 0 {
                    *d = t.add(*d, t.mul(f, s));
                }
            }
        }
    }
}

struct PrimeOps {
    p: u32,
    inverses: Vec<u16>,
}

impl PrimeOps {
    fn new(p: u32) -> Self {
        let mut inverses = vec![0u16; p as usize];
        for a in 1..p {
            let b = (1..p).find(|&b| a * b % p == 1).expect("p is prime");
            inverses[a as usize] = b as u16;
        }
        PrimeOps { p, inverses }
    }
}

#[inline]
fn axpy_mod<const P: u32>(dst: &mut [u16], f: u16, src: &[u16]) {
    let f = f as u32;
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = ((*d as u32 + f * s as u32) % P) as u16;
    }
}

impl RowOps for PrimeOps {
    fn inv(&self, a: u16) -> u16 {
        self.inverses[a as usize]
    }

    fn neg(&self, a: u16) -> u16 {
        ((self.p - a as u32) % self.p) as u16
    }

    fn scale(&self, row: &mut [u16], f: u16) {
        for x in row.iter_mut() {
            *x = (*x as u32 * f as u32 % self.p) as u16;
        }
    }

    fn axpy(&self, dst: &mut [u16], f: u16, src: &[u16]) {
        match self.p {
            2 => axpy_mod::<2>(dst, f, src),
            3 => axpy_mod::<3>(dst, f, src),
            5 => axpy_mod::<5>(dst, f, src),
            7 => axpy_mod::<7>(dst, f, src),
            p => {
                let f = f as u32;
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = ((*d as u32 + f * s as u32) % p) as u16;
                }
            }
        }
    }
}

/// Two distinct rows of a row-major buffer, both mutable.
fn two_rows(data: &mut [u16], cols: usize, a: usize, b: usize) -> (&mut [u16], &mut [u16]) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = data.split_at_mut(b * cols);
        (&mut lo[a * cols..(a + 1) * cols], &mut hi[..cols])
    } else {
        let (lo, hi) = data.split_at_mut(a * cols);
        (&mut hi[..cols], &mut lo[b * cols..(b + 1) * cols])
    }
}

/// In-place Gauss–Jordan elimination scanning columns left to right. On
/// return the first `rank` rows hold the reduced form; returns pivot columns.
fn gauss_jordan<O: RowOps>(ops: &O, data: &mut [u16], rows: usize, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pr) = (rank..rows).find(|&i| data[i * cols + c] != 0) else {
            continue;
        };
        if pr != rank {
            let (x, y) = two_rows(data, cols, pr, rank);
            x.swap_with_slice(y);
        }
        let lead = data[rank * cols + c];
        if lead != 1 {
            let f = ops.inv(lead);
            ops.scale(&mut data[rank * cols + c..(rank + 1) * cols], f);
        }
        for i in 0..rows {
            if i == rank {
                continue;
            }
            let a = data[i * cols + c];
            if a == 0 {
                continue;
            }
            let (dst, src) = two_rows(data, cols, i, rank);
            ops.axpy(&mut dst[c..], ops.neg(a), &src[c..]);
        }
        pivots.push(c);
        rank += 1;
    }
    pivots
}

/// Gauss–Jordan over GF(2) on bit-packed copies of the rows; writes the
/// reduced rows back into `data`.
fn gauss_jordan_bits(data: &mut [u16], rows: usize, cols: usize) -> Vec<usize> {
    let words = cols.div_ceil(64);
    let mut bits = vec![0u64; rows * words];
    for i in 0..rows {
        for j in 0..cols {
            if data[i * cols + j] & 1 == 1 {
                bits[i * words + j / 64] |= 1 << (j % 64);
            }
        }
    }
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (w, bit) = (c / 64, 1u64 << (c % 64));
        let Some(pr) = (rank..rows).find(|&i| bits[i * words + w] & bit != 0) else {
            continue;
        };
        if pr != rank {
            for k in 0..words {
                bits.swap(pr * words + k, rank * words + k);
            }
        }
        for i in 0..rows {
            if i != rank && bits[i * words + w] & bit != 0 {
                for k in w..words {
                    let v = bits[rank * words + k];
                    bits[i * words + k] ^= v;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    for i in 0..rows {
        for j in 0..cols {
            data[i * cols + j] = ((bits[i * words + j / 64] >> (j % 64)) & 1) as u16;
        }
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(
        tower: &Tower,
        order: u32,
        rows: usize,
        cols: usize,
        rng: &mut ChaCha8Rng,
    ) -> Matrix {
        let elems = tower.subfield_elements(order).unwrap();
        let data: Vec<Vec<u16>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| elems[rng.gen_range(0..elems.len())])
                    .collect()
            })
            .collect();
        Matrix::from_rows(order, cols, &data)
    }

    /// Low-rank matrix: product of random `rows × inner` and `inner × cols` factors.
    fn random_low_rank(
        tower: &Tower,
        order: u32,
        rows: usize,
        cols: usize,
        inner: usize,
        rng: &mut ChaCha8Rng,
    ) -> Matrix {
        let a = random_matrix(tower, order, rows, inner, rng);
        let b = random_matrix(tower, order, inner, cols, rng);
        let bt = b.transpose();
        let data: Vec<Vec<u16>> = a
            .iter_rows()
            .map(|ar| bt.iter_rows().map(|bc| dot(tower, ar, bc)).collect())
            .collect();
        Matrix::from_rows(order, cols, &data)
    }

    #[test]
    fn identity_is_reduced() {
        let t = Tower::new(2, 1, 1).unwrap();
        let id = Matrix::identity(4, 5);
        let e = rref(&t, &id);
        assert_eq!(e.matrix, id);
        assert_eq!(e.rank(), 5);
        assert_eq!(kernel_basis(&t, &id).rows(), 0);
        assert_eq!(dual_basis(&t, &id).rows(), 0);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let t = Tower::new(3, 1, 1).unwrap();
        let z = Matrix::zeros(9, 3, 4);
        assert_eq!(rank(&t, &z), 0);
        assert_eq!(kernel_basis(&t, &z).rows(), 4);
    }

    #[test]
    fn kernel_of_all_ones_row() {
        let t = Tower::new(2, 1, 1).unwrap();
        let m = Matrix::from_rows(2, 2, &[vec![1, 1]]);
        let k = kernel_basis(&t, &m);
        assert_eq!(k, Matrix::from_rows(2, 2, &[vec![1, 1]]));
    }

    #[test]
    fn rank_of_transpose() {
        let t = Tower::new(2, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let inner = 1 + trial % 25;
            let m = random_low_rank(&t, 4, 20, 30, inner, &mut rng);
            assert_eq!(rank(&t, &m), rank(&t, &m.transpose()));
        }
    }

    #[test]
    fn kernel_rank_nullity_gf8() {
        let t = Tower::new(2, 3, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_matrix(&t, 8, 10, 25, &mut rng);
            let k = kernel_basis(&t, &m);
            for v in k.iter_rows() {
                assert!(m.mul_vec(&t, v).iter().all(|&x| x == 0));
            }
            assert_eq!(rank(&t, &k), k.rows());
            assert_eq!(rank(&t, &k) + rank(&t, &m), 25);
        }
    }

    #[test]
    fn row_space_equality() {
        let t = Tower::new(2, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&t, 4, 4, 9, &mut rng);
        // shuffle and rescale rows
        let w = t.generator();
        let rows: Vec<Vec<u16>> = [2usize, 0, 3, 1]
            .iter()
            .map(|&i| a.row(i).iter().map(|&x| t.mul(x, w)).collect())
            .collect();
        let b = Matrix::from_rows(4, 9, &rows);
        assert!(row_space_equal(&t, &a, &b).unwrap());

        // appending a unit vector on a free column raises the rank
        let ech = rref(&t, &a);
        let mut extra = vec![0u16; 9];
        extra[ech.free_columns()[0]] = 1;
        let mut c = a.clone();
        c.push_row(&extra);
        assert!(!row_space_equal(&t, &a, &c).unwrap());
        assert_eq!(
            row_space_equal(&t, &a, &Matrix::zeros(2, 1, 9)),
            Err(LinalgError::FieldMismatch(4, 2))
        );
        assert_eq!(
            row_space_equal(&t, &a, &Matrix::zeros(4, 1, 8)),
            Err(LinalgError::DimensionMismatch(9, 8))
        );
    }

    #[test]
    fn backends_agree() {
        let t2 = Tower::new(2, 1, 2).unwrap();
        let t3 = Tower::new(3, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..50 {
            let rows = 5 + trial % 20;
            let order: Vec<usize> = {
                let mut o: Vec<usize> = (0..40).collect();
                for i in (1..o.len()).rev() {
                    o.swap(i, rng.gen_range(0..=i));
                }
                o
            };
            let m2 = random_low_rank(&t2, 2, rows, 40, 1 + trial % 12, &mut rng);
            let reference = rref_with(&t2, &m2, Some(&order), Backend::Tables).unwrap();
            assert_eq!(
                rref_with(&t2, &m2, Some(&order), Backend::Bits).unwrap(),
                reference
            );
            assert_eq!(
                rref_with(&t2, &m2, Some(&order), Backend::Prime).unwrap(),
                reference
            );

            let m3 = random_low_rank(&t3, 3, rows, 40, 1 + trial % 12, &mut rng);
            let reference = rref_with(&t3, &m3, Some(&order), Backend::Tables).unwrap();
            assert_eq!(
                rref_with(&t3, &m3, Some(&order), Backend::Prime).unwrap(),
                reference
            );
        }
    }

    /// Textbook elimination on plain integers mod 2.
    fn rank_mod2_reference(rows: &[Vec<u8>]) -> usize {
        let mut m: Vec<Vec<u8>> = rows.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            if let Some(p) = (rank..m.len()).find(|&i| m[i][c] % 2 == 1) {
                m.swap(p, rank);
                for i in 0..m.len() {
                    if i != rank && m[i][c] % 2 == 1 {
                        let pivot = m[rank].clone();
                        for (x, y) in m[i].iter_mut().zip(&pivot) {
                            *x = (*x + y) % 2;
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    #[test]
    fn gf2_matches_integer_reference() {
        let t = Tower::new(2, 1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let raw: Vec<Vec<u8>> = (0..8)
                .map(|_| (0..12).map(|_| rng.gen_range(0..2)).collect())
                .collect();
            let m = Matrix::from_rows(
                2,
                12,
                &raw.iter()
                    .map(|r| r.iter().map(|&x| x as u16).collect())
                    .collect::<Vec<_>>(),
            );
            assert_eq!(rank(&t, &m), rank_mod2_reference(&raw));
        }
    }

    #[test]
    fn builder_matches_batch_rref() {
        let t = Tower::new(3, 1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for order in [81u32, 9, 3] {
            let m = random_low_rank(&t, order, 30, 20, 12, &mut rng);
            let mut b = EchelonBuilder::new(&t, order, 20);
            let mut grew = 0;
            for row in m.iter_rows() {
                grew += b.insert(row.to_vec()) as usize;
            }
            assert_eq!(grew, b.rank());
            assert_eq!(b.echelon(), rref(&t, &m));
        }
    }

    #[test]
    fn column_order_is_validated() {
        let t = Tower::new(2, 1, 1).unwrap();
        let m = Matrix::identity(2, 3);
        assert_eq!(
            rref_in_order(&t, &m, &[0, 0, 1]).unwrap_err(),
            LinalgError::BadColumnOrder(3)
        );
        assert_eq!(
            rref_in_order(&t, &m, &[0, 1]).unwrap_err(),
            LinalgError::BadColumnOrder(3)
        );
    }

    #[test]
    fn checked_construction() {
        let t = Tower::new(2, 1, 2).unwrap();
        let w = t.generator();
        assert!(matches!(
            Matrix::from_rows_checked(&t, 2, 2, &[vec![1, w]]),
            Err(LinalgError::EntryNotInField { col: 1, .. })
        ));
        assert!(matches!(
            Matrix::from_rows_checked(&t, 16, 2, &[vec![1]]),
            Err(LinalgError::RaggedRows { .. })
        ));
        assert!(Matrix::from_rows_checked(&t, 16, 2, &[vec![1, w]]).is_ok());
    }

    #[test]
    fn text_export() {
        let m = Matrix::from_rows(4, 3, &[vec![1, 0, 2], vec![3, 3, 0]]);
        let mut out = Vec::new();
        m.write_text(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "1 0 2\n3 3 0\n");
    }
}
