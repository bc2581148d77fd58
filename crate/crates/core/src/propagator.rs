//! `psi(t) = exp(-iHt) psi_0` for sparse Hermitian `H`.
//!
//! [`evolve`] is a short-iterative Lanczos propagator with full
//! re-orthogonalization and adaptive substeps. Each substep of length `tau`
//! is accepted when the a-posteriori estimate
//! `beta_0 * beta_m * |e_m^T exp(-i tau T_m) e_1|` is at most `tol * |tau|`,
//! so the accumulated error bound is `tol * |t|`. [`dense_expm`] is the
//! eigen-decomposition oracle used to certify it.

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{BasisTag, StateVector};
use crate::operators::{BlockDecomposition, SparseHermitianOperator, SparseMatrix};

/// Largest dimension accepted by the dense oracle.
pub const DENSE_LIMIT: usize = 4000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagationConfig {
    pub time: f64,
    /// Local error tolerance per unit time.
    pub tolerance: f64,
    pub krylov_dim: usize,
    pub max_substeps: usize,
}

impl PropagationConfig {
    pub fn new(time: f64) -> Self {
        Self { time, tolerance: 1e-9, krylov_dim: 40, max_substeps: 100_000 }
    }

    pub fn with_time(self, time: f64) -> Self {
        Self { time, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.time.is_finite() {
            return Err(Error::InvalidInput(format!("time must be finite, got {}", self.time)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.krylov_dim < 2 {
            return Err(Error::InvalidInput("Krylov dimension must be at least 2".into()));
        }
        if self.max_substeps == 0 {
            return Err(Error::InvalidInput("substep budget must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PropagationStats {
    pub substeps: usize,
    pub matvecs: usize,
    /// Sum of the accepted local error estimates.
    pub error_estimate: f64,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    const CHUNK: usize = 1 << 14;
    if a.len() > 2 * CHUNK {
        // fixed chunks keep the summation order independent of scheduling
        let parts: Vec<C64> = a
            .par_chunks(CHUNK)
            .zip(b.par_chunks(CHUNK))
            .map(|(x, y)| x.iter().zip(y).map(|(x, y)| x.conj() * y).sum())
            .collect();
        parts.iter().sum()
    } else {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Orthonormal Krylov basis and tridiagonal projection of `h` from `start`.
struct Lanczos {
    basis: Vec<Vec<C64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// `beta_m`, the coupling to the next (unbuilt) Krylov vector; zero on
    /// breakdown.
    residual_beta: f64,
}

fn lanczos(h: &SparseMatrix, start: &[C64], m_max: usize, scale: f64) -> Lanczos {
    let n = start.len();
    let m_max = m_max.min(n);
    let b0 = norm(start);
    let mut basis = vec![start.iter().map(|x| x / b0).collect::<Vec<_>>()];
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta = Vec::with_capacity(m_max);
    let mut w = vec![C64::default(); n];
    let breakdown = 1e-13 * scale.max(1.0);
    loop {
        let j = basis.len() - 1;
        h.matvec_into(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        // full re-orthogonalization, two passes
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                axpy(&mut w, -c, v);
            }
        }
        let b = norm(&w);
        if b <= breakdown || basis.len() == m_max {
            let residual_beta = if b <= breakdown { 0.0 } else { b };
            return Lanczos { basis, alpha, beta, residual_beta };
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, Mat<f64>) {
    let m = alpha.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let evd = t
        .self_adjoint_eigen(Side::Lower)
        .expect("symmetric tridiagonal eigenproblem converges");
    let s = evd.S().column_vector();
    let values = (0..m).map(|i| s[i]).collect();
    (values, evd.U().to_owned())
}

/// `exp(-i tau T) e_1` from the eigen-decomposition of `T`.
fn small_propagator(values: &[f64], vectors: &Mat<f64>, tau: f64) -> Vec<C64> {
    let m = values.len();
    (0..m)
        .map(|i| {
            (0..m)
                .map(|k| C64::from_polar(1.0, -tau * values[k]) * (vectors[(i, k)] * vectors[(0, k)]))
                .sum()
        })
        .collect()
}

/// Krylov propagation. Norm and energy are conserved up to the substep
/// truncation error.
pub fn evolve(h: &SparseHermitianOperator, psi0: &StateVector, cfg: &PropagationConfig) -> Result<StateVector> {
    evolve_with_stats(h, psi0, cfg).map(|(s, _)| s)
}

pub fn evolve_with_stats(
    h: &SparseHermitianOperator,
    psi0: &StateVector,
    cfg: &PropagationConfig,
) -> Result<(StateVector, PropagationStats)> {
    cfg.validate()?;
    psi0.ensure_same_basis(h.tag())?;
    let mut stats = PropagationStats::default();
    let mut psi = psi0.amplitudes().to_vec();
    let beta0 = norm(&psi);
    if cfg.time == 0.0 || beta0 == 0.0 {
        return Ok((psi0.clone(), stats));
    }
    let scale = h.matrix().max_abs();
    let sign = cfg.time.signum();
    let total = cfg.time.abs();
    let mut done = 0.0;
    let mut step = total;
    while done < total {
        if stats.substeps >= cfg.max_substeps {
            return Err(Error::NonConvergence {
                residual: stats.error_estimate,
                substeps: stats.substeps,
                reached: sign * done,
                target: cfg.time,
            });
        }
        let remaining = total - done;
        let kr = lanczos(h.matrix(), &psi, cfg.krylov_dim, scale);
        stats.matvecs += kr.alpha.len();
        let (values, vectors) = tridiagonal_eigen(&kr.alpha, &kr.beta);
        let m = values.len();
        let mut tau = step.min(remaining);
        let (y, err) = loop {
            let y = small_propagator(&values, &vectors, sign * tau);
            let err = beta0 * kr.residual_beta * y[m - 1].norm();
            if err <= cfg.tolerance * tau {
                break (y, err);
            }
            let shrink = (0.9 * (cfg.tolerance * tau / err).powf(1.0 / m as f64)).clamp(0.1, 0.5);
            tau *= shrink;
            if tau <= total * f64::EPSILON {
                return Err(Error::NonConvergence {
                    residual: err,
                    substeps: stats.substeps,
                    reached: sign * done,
                    target: cfg.time,
                });
            }
        };
        let mut next = vec![C64::default(); psi.len()];
        for (v, c) in kr.basis.iter().zip(&y) {
            axpy(&mut next, c * beta0, v);
        }
        psi = next;
        done = if tau >= remaining { total } else { done + tau };
        stats.substeps += 1;
        stats.error_estimate += err;
        step = if kr.residual_beta == 0.0 { remaining } else { tau * 1.5 };
    }
    Ok((StateVector::new(psi0.tag().clone(), psi)?, stats))
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
pub struct DenseEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<C64>,
}

pub fn dense_eigen(a: &SparseMatrix) -> Result<DenseEigen> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::InvalidInput(format!("matrix is {}x{}, not square", n, a.ncols())));
    }
    if n > DENSE_LIMIT {
        return Err(Error::DimensionLimit { requested: n as u128, limit: DENSE_LIMIT });
    }
    let mut m = Mat::<C64>::zeros(n, n);
    for (r, c, v) in a.triplets() {
        m[(r, c)] = v;
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::InvalidInput(format!("dense eigensolver failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let values = (0..n).map(|i| s[i].re).collect();
    Ok(DenseEigen { values, vectors: evd.U().to_owned() })
}

impl DenseEigen {
    /// `exp(-iHt) psi`.
    pub fn propagate(&self, psi: &[C64], t: f64) -> Vec<C64> {
        let n = self.values.len();
        let u = &self.vectors;
        let coeffs: Vec<C64> = (0..n)
            .map(|k| {
                let c: C64 = (0..n).map(|i| u[(i, k)].conj() * psi[i]).sum();
                c * C64::from_polar(1.0, -t * self.values[k])
            })
            .collect();
        (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|k| u[(i, k)] * coeffs[k]).sum())
            .collect()
    }
}

/// Oracle propagation by full eigen-decomposition.
pub fn dense_expm(h: &SparseHermitianOperator, psi0: &StateVector, t: f64) -> Result<StateVector> {
    psi0.ensure_same_basis(h.tag())?;
    let eig = dense_eigen(h.matrix())?;
    StateVector::new(psi0.tag().clone(), eig.propagate(psi0.amplitudes(), t))
}

/// Evolves every momentum block separately and recombines.
pub fn evolve_blocked(
    dec: &BlockDecomposition,
    psi0: &StateVector,
    cfg: &PropagationConfig,
) -> Result<StateVector> {
    let parts = dec.split(psi0)?;
    let evolved = dec
        .blocks()
        .par_iter()
        .zip(parts.par_iter())
        .map(|(b, part)| {
            if part.norm() == 0.0 {
                Ok(part.clone())
            } else {
                evolve(&b.operator, part, cfg)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    dec.combine(&evolved)
}

/// A random sparse Hermitian matrix with about `per_row` entries in every
/// row and entries of modulus at most one.
pub fn random_hermitian(dim: usize, per_row: usize, seed: u64) -> Result<SparseHermitianOperator> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut triplets = Vec::with_capacity(dim * (per_row + 1));
    for r in 0..dim {
        triplets.push((r, r, C64::new(rng.random_range(-1.0..1.0), 0.0)));
        for _ in 0..per_row / 2 {
            let c = rng.random_range(0..dim);
            if c == r {
                continue;
            }
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            triplets.push((r, c, z));
            triplets.push((c, r, z.conj()));
        }
    }
    let m = SparseMatrix::from_triplets(dim, dim, triplets);
    SparseHermitianOperator::new(BasisTag::from_descriptor(&format!("random({dim},{seed})"), dim), m)
}

/// A random normalized vector on `tag`.
pub fn random_state(tag: BasisTag, seed: u64) -> StateVector {
    let mut rng = StdRng::seed_from_u64(seed);
    let amps = (0..tag.dim())
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut s = StateVector::new(tag, amps).expect("dimension matches");
    s.normalize().expect("nonzero");
    s
}

/// `||evolve(h, psi, t) - dense_expm(h, psi, t)||`.
pub fn dense_deviation(h: &SparseHermitianOperator, psi: &StateVector, cfg: &PropagationConfig) -> Result<f64> {
    let krylov = evolve(h, psi, cfg)?;
    let exact = dense_expm(h, psi, cfg.time)?;
    krylov.distance(&exact)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::BasisTag;

    #[test]
    fn diagonal_phase() {
        let h = SparseHermitianOperator::new(
            BasisTag::plain(3),
            SparseMatrix::from_diagonal(&[1.0, -2.0, 0.5]),
        )
        .unwrap();
        let psi = StateVector::basis_state(BasisTag::plain(3), 1).unwrap();
        let out = evolve(&h, &psi, &PropagationConfig::new(0.7)).unwrap();
        let expected = C64::from_polar(1.0, 2.0 * 0.7);
        assert!((out.amplitudes()[1] - expected).norm() < 1e-12);
        let same = evolve(&h, &psi, &PropagationConfig::new(0.0)).unwrap();
        assert_eq!(same, psi);
    }

    #[test]
    fn krylov_matches_dense_and_reverses() {
        let h = random_hermitian(200, 200, 7).unwrap();
        let psi = random_state(h.tag().clone(), 8);
        let cfg = PropagationConfig::new(1.3);
        let k = evolve(&h, &psi, &cfg).unwrap();
        let d = dense_expm(&h, &psi, 1.3).unwrap();
        assert!(k.distance(&d).unwrap() < 1e-8);
        assert!((k.norm() - 1.0).abs() < 1e-12);
        let e0 = h.expectation(&psi).unwrap();
        assert!((h.expectation(&k).unwrap() - e0).abs() < 1e-9 * 2.3);
        let back = evolve(&h, &k, &cfg.with_time(-1.3)).unwrap();
        assert!(back.distance(&psi).unwrap() < 1e-8);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let h = random_hermitian(60, 60, 3).unwrap();
        let psi = random_state(h.tag().clone(), 4);
        let cfg = PropagationConfig { krylov_dim: 3, max_substeps: 2, ..PropagationConfig::new(50.0) };
        assert!(matches!(evolve(&h, &psi, &cfg), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn dense_guard() {
        let big = SparseMatrix::identity(DENSE_LIMIT + 1);
        assert!(matches!(dense_eigen(&big), Err(Error::DimensionLimit { .. })));
    }
}
