//! Exact integer lattice arithmetic: Hermite and Smith normal forms and the
//! coset space `Z^r / L` for a sublattice `L`.
//!
//! Lattice generators are the columns of an `r x k` matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Refuse to enumerate quotients larger than this.
pub const MAX_ENUMERATED_COSETS: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("quotient is infinite")]
    InfiniteQuotient,
    #[error("quotient has {order} cosets, above the enumeration limit")]
    TooManyCosets { order: BigInt },
}

/// Dense integer matrix with explicit shape, so `r x 0` matrices keep `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![vec![BigInt::zero(); cols]; rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = BigInt::one();
        }
        m
    }

    /// Builds from rows; all rows must share a length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
        }
    }

    /// `rows x columns.len()` matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self, LatticeError> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(LatticeError::DimensionMismatch { expected: rows, found: col.len() });
            }
            for (i, x) in col.iter().enumerate() {
                m.data[i][j] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i][j]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.data.iter().map(|row| row[j].clone()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i][j] += &self.data[i][k] * &other.data[k][j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "shape mismatch in product");
        self.data.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.determinant().abs().is_one()
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for row in &mut self.data {
            row.swap(a, b);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for row in &mut self.data {
            row[j] = -&row[j];
        }
    }

    // col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for row in &mut self.data {
            let delta = &row[src] * q;
            row[dst] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.data[i] {
            *x = -&*x;
        }
    }

    // row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        let src_row = self.data[src].clone();
        for (x, y) in self.data[dst].iter_mut().zip(&src_row) {
            *x += y * q;
        }
    }
}

/// Column-style Hermite normal form: returns `(H, U)` with `H = m * U`, `U`
/// unimodular, `H` lower-triangular in column echelon form with positive
/// pivots and entries left of each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols);
    let mut pivot_col = 0;
    for i in 0..h.rows {
        if pivot_col == h.cols {
            break;
        }
        loop {
            let best = (pivot_col..h.cols)
                .filter(|&j| !h.data[i][j].is_zero())
                .min_by(|&a, &b| h.data[i][a].abs().cmp(&h.data[i][b].abs()));
            let Some(best) = best else { break };
            h.swap_cols(pivot_col, best);
            u.swap_cols(pivot_col, best);
            let mut done = true;
            for j in pivot_col + 1..h.cols {
                if h.data[i][j].is_zero() {
                    continue;
                }
                let q = -h.data[i][j].div_floor(&h.data[i][pivot_col]);
                h.add_col(j, pivot_col, &q);
                u.add_col(j, pivot_col, &q);
                if !h.data[i][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h.data[i][pivot_col].is_zero() {
            continue;
        }
        if h.data[i][pivot_col].is_negative() {
            h.negate_col(pivot_col);
            u.negate_col(pivot_col);
        }
        let pivot = h.data[i][pivot_col].clone();
        for j in 0..pivot_col {
            let q = -h.data[i][j].div_floor(&pivot);
            if !q.is_zero() {
                h.add_col(j, pivot_col, &q);
                u.add_col(j, pivot_col, &q);
            }
        }
        pivot_col += 1;
    }
    (h, u)
}

/// Smith normal form `S = U * m * V`. Also carries `U^-1`, needed to map
/// reduced coordinates back to `Z^r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.data[i][i].clone()).collect()
    }
}

struct SmithState {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl SmithState {
    fn row_swap(&mut self, x: usize, y: usize) {
        self.a.data.swap(x, y);
        self.u.data.swap(x, y);
        self.u_inv.swap_cols(x, y);
    }

    fn row_negate(&mut self, x: usize) {
        self.a.negate_row(x);
        self.u.negate_row(x);
        self.u_inv.negate_col(x);
    }

    fn row_add(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_row(dst, src, q);
        self.u.add_row(dst, src, q);
        self.u_inv.add_col(src, dst, &-q);
    }

    fn col_swap(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.v.swap_cols(x, y);
    }

    fn col_add(&mut self, dst: usize, src: usize, q: &BigInt) {
        self.a.add_col(dst, src, q);
        self.v.add_col(dst, src, q);
    }
}

pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, k) = (m.rows, m.cols);
    let mut st = SmithState {
        a: m.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(k),
    };
    for t in 0..r.min(k) {
        'pivot: loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..k {
                    let x = &st.a.data[i][j];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < st.a.data[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break 'pivot };
            st.row_swap(t, bi);
            st.col_swap(t, bj);

            let mut clean = true;
            for i in t + 1..r {
                if st.a.data[i][t].is_zero() {
                    continue;
                }
                let q = -st.a.data[i][t].div_floor(&st.a.data[t][t]);
                st.row_add(i, t, &q);
                clean &= st.a.data[i][t].is_zero();
            }
            for j in t + 1..k {
                if st.a.data[t][j].is_zero() {
                    continue;
                }
                let q = -st.a.data[t][j].div_floor(&st.a.data[t][t]);
                st.col_add(j, t, &q);
                clean &= st.a.data[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let pivot = st.a.data[t][t].clone();
            let offender = (t + 1..r).find(|&i| (t + 1..k).any(|j| !st.a.data[i][j].is_multiple_of(&pivot)));
            match offender {
                Some(i) => st.row_add(t, i, &BigInt::one()),
                None => break 'pivot,
            }
        }
        if st.a.data[t][t].is_negative() {
            st.row_negate(t);
        }
    }
    Smith { s: st.a, u: st.u, v: st.v, u_inv: st.u_inv }
}

/// A sublattice of `Z^rank` given by generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    rank: usize,
    generators: Vec<Vec<BigInt>>,
}

impl Lattice {
    pub fn new(rank: usize, generators: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        if let Some(bad) = generators.iter().find(|g| g.len() != rank) {
            return Err(LatticeError::DimensionMismatch { expected: rank, found: bad.len() });
        }
        Ok(Lattice { rank, generators })
    }

    pub fn from_i64(rank: usize, generators: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(rank, generators.iter().map(|g| to_big(g)).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[Vec<BigInt>] {
        &self.generators
    }

    pub fn generator_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.rank, &self.generators).expect("generator lengths checked at construction")
    }

    /// Membership by forward substitution against the Hermite form.
    pub fn contains(&self, gamma: &[BigInt]) -> Result<bool, LatticeError> {
        check_len(self.rank, gamma)?;
        let (h, _) = hermite_normal_form(&self.generator_matrix());
        let mut residual = gamma.to_vec();
        let mut col = 0;
        for i in 0..self.rank {
            if col < h.cols && !h.data[i][col].is_zero() {
                let (q, rem) = residual[i].div_rem(&h.data[i][col]);
                if !rem.is_zero() {
                    return Ok(false);
                }
                for (row, x) in residual.iter_mut().enumerate() {
                    *x -= &q * &h.data[row][col];
                }
                col += 1;
            } else if !residual[i].is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

pub fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn check_len(expected: usize, v: &[BigInt]) -> Result<(), LatticeError> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(LatticeError::DimensionMismatch { expected, found: v.len() })
    }
}

/// Serializes a big integer as a JSON number when it fits in `i64`, else as a
/// decimal string.
pub fn serialize_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match x.to_i64() {
        Some(v) => s.serialize_i64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CosetRep(pub Vec<BigInt>);

impl Serialize for CosetRep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct Entry<'a>(&'a BigInt);
        impl Serialize for Entry<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                serialize_bigint(self.0, s)
            }
        }
        s.collect_seq(self.0.iter().map(Entry))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuotientOrder {
    Finite(#[serde(serialize_with = "serialize_bigint")] BigInt),
    Infinite,
}

/// `Z^r / L` via the Smith form of the generator matrix. In the coordinates
/// `y = U * gamma` the quotient is `prod Z/d_i x Z^free`.
#[derive(Debug, Clone)]
pub struct QuotientStructure {
    rank: usize,
    diag: Vec<BigInt>,
    u: IntMatrix,
    u_inv: IntMatrix,
    invariant_factors: Vec<BigInt>,
    free_rank: usize,
}

pub fn quotient_structure(lattice: &Lattice) -> QuotientStructure {
    let r = lattice.rank;
    let smith = smith_normal_form(&lattice.generator_matrix());
    let mut diag = smith.diagonal();
    diag.resize(r, BigInt::zero());
    let invariant_factors: Vec<BigInt> = diag.iter().filter(|d| *d > &BigInt::one()).cloned().collect();
    let free_rank = diag.iter().filter(|d| d.is_zero()).count();
    QuotientStructure { rank: r, diag, u: smith.u, u_inv: smith.u_inv, invariant_factors, free_rank }
}

impl QuotientStructure {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn order(&self) -> QuotientOrder {
        if self.free_rank > 0 {
            QuotientOrder::Infinite
        } else {
            QuotientOrder::Finite(self.invariant_factors.iter().product())
        }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn canonical(&self, gamma: &[BigInt]) -> Result<CosetRep, LatticeError> {
        check_len(self.rank, gamma)?;
        let y: Vec<BigInt> = self
            .u
            .mul_vec(gamma)
            .into_iter()
            .zip(&self.diag)
            .map(|(y, d)| if d.is_zero() { y } else { y.mod_floor(d) })
            .collect();
        Ok(CosetRep(self.u_inv.mul_vec(&y)))
    }

    pub fn canonical_i64(&self, gamma: &[i64]) -> Result<CosetRep, LatticeError> {
        self.canonical(&to_big(gamma))
    }

    pub fn zero(&self) -> CosetRep {
        CosetRep(vec![BigInt::zero(); self.rank])
    }

    /// Lazily enumerates every coset once, in mixed-radix order over the
    /// invariant factors. Not capped; see [`enumerate_cosets`].
    pub fn cosets(&self) -> Result<CosetIter<'_>, LatticeError> {
        if !self.is_finite() {
            return Err(LatticeError::InfiniteQuotient);
        }
        Ok(CosetIter { q: self, digits: Some(vec![BigInt::zero(); self.rank]) })
    }
}

pub fn coset_canonical(q: &QuotientStructure, gamma: &[BigInt]) -> Result<CosetRep, LatticeError> {
    q.canonical(gamma)
}

/// All cosets, refusing quotients above [`MAX_ENUMERATED_COSETS`].
pub fn enumerate_cosets(q: &QuotientStructure) -> Result<Vec<CosetRep>, LatticeError> {
    if let QuotientOrder::Finite(n) = q.order() {
        if n > BigInt::from(MAX_ENUMERATED_COSETS) {
            return Err(LatticeError::TooManyCosets { order: n });
        }
    }
    Ok(q.cosets()?.collect())
}

pub struct CosetIter<'a> {
    q: &'a QuotientStructure,
    digits: Option<Vec<BigInt>>,
}

impl Iterator for CosetIter<'_> {
    type Item = CosetRep;

    fn next(&mut self) -> Option<CosetRep> {
        let digits = self.digits.as_mut()?;
        let rep = CosetRep(self.q.u_inv.mul_vec(digits));
        let mut carried = true;
        for (x, d) in digits.iter_mut().zip(&self.q.diag).rev() {
            if d <= &BigInt::one() {
                continue;
            }
            *x += 1;
            if &*x < d {
                carried = false;
                break;
            }
            *x = BigInt::zero();
        }
        if carried {
            self.digits = None;
        }
        Some(rep)
    }
}
