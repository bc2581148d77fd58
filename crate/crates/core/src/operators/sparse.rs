use std::io::Write;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{BasisTag, StateVector};

/// Entries with modulus below this are not stored.
pub const PRUNE_TOL: f64 = 1e-15;

/// Maximum tolerated `|A_ij - conj(A_ji)|` for a Hermitian operator.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Compressed sparse row matrix of complex entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.len(),
            diag.iter().enumerate().map(|(i, &d)| (i, i, C64::new(d, 0.0))),
        )
    }

    /// Sums duplicate coordinates and prunes entries below [`PRUNE_TOL`].
    pub fn from_triplets<I>(nrows: usize, ncols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, C64)>,
    {
        let mut t: Vec<(usize, usize, C64)> = triplets.into_iter().collect();
        t.par_sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut rows = Vec::with_capacity(t.len());
        let mut i = 0;
        while i < t.len() {
            let (r, c, mut v) = t[i];
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            i += 1;
            while i < t.len() && t[i].0 == r && t[i].1 == c {
                v += t[i].2;
                i += 1;
            }
            if v.norm() >= PRUNE_TOL {
                rows.push(r);
                col_idx.push(c);
                values.push(v);
            }
        }
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(pos) => self.values[span.start + pos],
            Err(_) => C64::default(),
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::default(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        let kernel = |(r, out): (usize, &mut C64)| {
            let mut acc = C64::default();
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *out = acc;
        };
        if self.nnz() > 1 << 16 {
            y.par_iter_mut().enumerate().for_each(kernel);
        } else {
            y.iter_mut().enumerate().for_each(kernel);
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())),
        )
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().map(|(r, c, v)| (r, c, v * factor)),
        )
    }

    /// `self + factor * other`.
    pub fn add_scaled(&self, other: &SparseMatrix, factor: C64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets()
                .chain(other.triplets().map(|(r, c, v)| (r, c, v * factor))),
        )
    }

    pub fn add(&self, other: &SparseMatrix) -> Self {
        self.add_scaled(other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Self {
        self.add_scaled(other, C64::new(-1.0, 0.0))
    }

    pub fn matmul(&self, other: &SparseMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let rows: Vec<Vec<(usize, usize, C64)>> = (0..self.nrows)
            .into_par_iter()
            .map(|r| {
                let mut acc: Vec<(usize, usize, C64)> = Vec::new();
                for (k, a) in self.row(r) {
                    for (c, b) in other.row(k) {
                        acc.push((r, c, a * b));
                    }
                }
                acc
            })
            .collect();
        Self::from_triplets(self.nrows, other.ncols, rows.into_iter().flatten())
    }

    /// `A B - B A`.
    pub fn commutator(&self, other: &SparseMatrix) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a + v.norm_sqr()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.sub(&self.adjoint()).max_abs()
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn restrict(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (p, &c) in cols.iter().enumerate() {
            col_pos[c] = p;
        }
        let mut t = Vec::new();
        for (pr, &r) in rows.iter().enumerate() {
            for (c, v) in self.row(r) {
                if col_pos[c] != usize::MAX {
                    t.push((pr, col_pos[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), t)
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let mut d = vec![vec![C64::default(); self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v;
        }
        d
    }

    /// `I_outer (x) self`: block-diagonal repetition.
    pub fn kron_identity_left(&self, outer: usize) -> Self {
        let (nr, nc) = (self.nrows, self.ncols);
        Self::from_triplets(
            outer * nr,
            outer * nc,
            (0..outer).flat_map(|t| self.triplets().map(move |(r, c, v)| (t * nr + r, t * nc + c, v))),
        )
    }

    /// Relative Frobenius distance `||A - B|| / max(||A||, ||B||)`, zero when
    /// both vanish.
    pub fn relative_distance(&self, other: &SparseMatrix) -> f64 {
        let scale = self.frobenius_norm().max(other.frobenius_norm());
        if scale == 0.0 {
            return 0.0;
        }
        self.sub(other).frobenius_norm() / scale
    }
}

/// Immutable Hermitian operator on a tagged basis, with the Hermiticity
/// deviation measured at construction.
#[derive(Clone, Debug)]
pub struct SparseHermitianOperator {
    tag: BasisTag,
    matrix: SparseMatrix,
    hermiticity_deviation: f64,
}

impl SparseHermitianOperator {
    pub fn new(tag: BasisTag, matrix: SparseMatrix) -> Result<Self> {
        if matrix.nrows() != tag.dim() || matrix.ncols() != tag.dim() {
            return Err(Error::InvalidInput(format!(
                "matrix is {}x{}, basis dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                tag.dim()
            )));
        }
        let deviation = matrix.hermiticity_deviation();
        if !(deviation <= HERMITICITY_TOL) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { tag, matrix, hermiticity_deviation: deviation })
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.tag.dim()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        self.hermiticity_deviation
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        state.ensure_same_basis(&self.tag)?;
        StateVector::new(self.tag.clone(), self.matrix.matvec(state.amplitudes()))
    }

    /// `<psi, H psi>` (real up to rounding).
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let h = self.apply(state)?;
        Ok(state.inner(&h)?.re)
    }

    /// Coordinate dump: a header line naming the basis hash, then
    /// `row col re im` per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "# bfdyn-operator 1 basis {} dim {} nnz {}",
            self.tag.hash(),
            self.dim(),
            self.matrix.nnz()
        )?;
        for (r, c, v) in self.matrix.triplets() {
            writeln!(w, "{r} {c} {:?} {:?}", v.re, v.im)?;
        }
        Ok(())
    }
}
