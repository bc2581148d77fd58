//! Normal-ordered words of ladder operators and functions of `N_+`, and their
//! assembly into sparse matrices over occupation bases.
//!
//! A [`Term`] is `coef * F_1 F_2 ... F_n` written left to right and applied
//! right to left, optionally multiplied by the tracer shift
//! `exp(2 pi i s.x)` (tracer plane wave `q` goes to `q + s`). Matrix elements
//! are taken between basis elements only, so a term whose image leaves the
//! basis (mode cutoff, tracer cutoff, excitation cap) contributes nothing; this
//! is the Galerkin projection `P A P` and keeps `A^*` consistent with `A`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::sparse::SparseMatrix;
use crate::fock::{JointBasis, OccupationBasis};
use crate::lattice::Momentum;

/// A diagonal function of the excitation number `N_+`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NumberFn {
    /// `N - N_+`
    Depletion(u32),
    /// `sqrt(N - N_+)`
    SqrtDepletion(u32),
    /// `N_+`
    Count,
}

impl NumberFn {
    /// The square of the value at `N_+ = n_plus`; an integer.
    #[inline]
    fn eval_sq(self, n_plus: i64) -> f64 {
        match self {
            NumberFn::Depletion(n) => ((n as i64 - n_plus).max(0) as f64).powi(2),
            NumberFn::SqrtDepletion(n) => (n as i64 - n_plus).max(0) as f64,
            NumberFn::Count => (n_plus as f64).powi(2),
        }
    }
}

/// One factor of a word. Mode indices are local to the basis the word acts on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    Create(usize),
    Annihilate(usize),
    Number(NumberFn),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coef: C64,
    pub factors: Vec<Factor>,
    pub tracer_shift: Momentum,
}

impl Term {
    pub fn new(coef: C64, factors: Vec<Factor>) -> Self {
        Self { coef, factors, tracer_shift: Momentum::ZERO }
    }

    pub fn shifted(coef: C64, factors: Vec<Factor>, tracer_shift: Momentum) -> Self {
        Self { coef, factors, tracer_shift }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.coef *= factor;
        self
    }
}

/// Applies `factors` (right to left) to `occ` in place. `condensate` is the
/// local index of the `k = 0` mode, if the basis carries it. Returns the real
/// coefficient, or `None` if the word annihilates the state. The coefficient
/// is the square root of an integer product, taken once at the end.
pub fn apply_word(factors: &[Factor], occ: &mut [u32], condensate: Option<usize>) -> Option<f64> {
    let total: i64 = occ.iter().map(|&n| n as i64).sum();
    let mut n_plus = total - condensate.map_or(0, |c| occ[c] as i64);
    let mut coef_sq = 1.0;
    for f in factors.iter().rev() {
        match *f {
            Factor::Annihilate(l) => {
                if occ[l] == 0 {
                    return None;
                }
                coef_sq *= occ[l] as f64;
                occ[l] -= 1;
                if Some(l) != condensate {
                    n_plus -= 1;
                }
            }
            Factor::Create(l) => {
                occ[l] += 1;
                coef_sq *= occ[l] as f64;
                if Some(l) != condensate {
                    n_plus += 1;
                }
            }
            Factor::Number(func) => {
                coef_sq *= func.eval_sq(n_plus);
                if coef_sq == 0.0 {
                    return None;
                }
            }
        }
    }
    Some(coef_sq.sqrt())
}

/// Local index of the condensate mode in `basis`, if present.
pub fn condensate_local<B: OccupationBasis>(basis: &B) -> Option<usize> {
    basis.local_mode(basis.mode_set().zero_index())
}

/// Transition lists: for every column `b` of `from`, the pairs
/// `(row in to, term index, coefficient)`.
fn transitions<S, T>(from: &S, to: &T, terms: &[Term]) -> Vec<Vec<(usize, usize, C64)>>
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    assert_eq!(from.mode_count(), to.mode_count());
    let cond_from = condensate_local(from);
    (0..from.dim())
        .into_par_iter()
        .map_init(
            || (vec![0u32; from.mode_count()], vec![0u32; from.mode_count()]),
            |(occ, work), b| {
                from.unrank_into(b, occ);
                let mut out = Vec::new();
                for (ti, term) in terms.iter().enumerate() {
                    work.copy_from_slice(occ);
                    if let Some(c) = apply_word(&term.factors, work, cond_from) {
                        if let Some(row) = to.rank(work) {
                            out.push((row, ti, term.coef * c));
                        }
                    }
                }
                out
            },
        )
        .collect()
}

/// Matrix of `sum terms` between two boson bases over the same modes
/// (rows: `to`, columns: `from`). Tracer shifts must be zero.
pub fn assemble_between<S, T>(from: &S, to: &T, terms: &[Term]) -> SparseMatrix
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    assert!(terms.iter().all(|t| t.tracer_shift.is_zero()), "boson-only terms expected");
    let cols = transitions(from, to, terms);
    SparseMatrix::from_triplets(
        to.dim(),
        from.dim(),
        cols.into_iter()
            .enumerate()
            .flat_map(|(b, list)| list.into_iter().map(move |(r, _, v)| (r, b, v))),
    )
}

/// Matrix of `sum terms` on a single boson basis.
pub fn assemble_boson<B: OccupationBasis>(basis: &B, terms: &[Term]) -> SparseMatrix {
    assemble_between(basis, basis, terms)
}

/// Matrix of `sum terms + diag` on a joint tracer/boson basis, where `diag`
/// gives a diagonal energy from the tracer momentum and boson occupations.
pub fn assemble_joint<B, D>(joint: &JointBasis<B>, terms: &[Term], diag: D) -> SparseMatrix
where
    B: OccupationBasis,
    D: Fn(Momentum, &[u32]) -> f64 + Sync,
{
    let boson = joint.boson();
    let tracer = joint.tracer();
    let cols = transitions(boson, boson, terms);
    let boson_diag: Vec<Vec<u32>> = (0..boson.dim()).map(|b| boson.occupation(b)).collect();
    let triplets: Vec<(usize, usize, C64)> = (0..tracer.len())
        .into_par_iter()
        .flat_map_iter(|t| {
            let q = tracer.momentum(t);
            let mut out = Vec::new();
            for (b, list) in cols.iter().enumerate() {
                let col = joint.join(t, b);
                let e = diag(q, &boson_diag[b]);
                if e != 0.0 {
                    out.push((col, col, C64::new(e, 0.0)));
                }
                for &(rb, ti, v) in list {
                    if let Some(rt) = tracer.index_of(q + terms[ti].tracer_shift) {
                        out.push((joint.join(rt, rb), col, v));
                    }
                }
            }
            out
        })
        .collect();
    SparseMatrix::from_triplets(joint.dim(), joint.dim(), triplets)
}

/// Matrix of `sum terms` between joint bases sharing the tracer modes
/// (rows: `to`, columns: `from`).
pub fn assemble_joint_between<S, T>(from: &JointBasis<S>, to: &JointBasis<T>, terms: &[Term]) -> SparseMatrix
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    assert_eq!(from.tracer(), to.tracer());
    let tracer = from.tracer();
    let cols = transitions(from.boson(), to.boson(), terms);
    let mut triplets = Vec::new();
    for t in 0..tracer.len() {
        let q = tracer.momentum(t);
        for (b, list) in cols.iter().enumerate() {
            for &(rb, ti, v) in list {
                if let Some(rt) = tracer.index_of(q + terms[ti].tracer_shift) {
                    triplets.push((to.join(rt, rb), from.join(t, b), v));
                }
            }
        }
    }
    SparseMatrix::from_triplets(to.dim(), from.dim(), triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ExcitationBasis, SectorBasis};
    use crate::lattice::ModeSet;
    use Factor::*;

    #[test]
    fn word_coefficients() {
        // a^* a on |3> gives 3
        let mut occ = [3u32];
        assert_eq!(apply_word(&[Create(0), Annihilate(0)], &mut occ, None), Some(3.0));
        assert_eq!(occ, [3]);
        // a on vacuum vanishes
        let mut vac = [0u32];
        assert_eq!(apply_word(&[Annihilate(0)], &mut vac, None), None);
        // sqrt(N - N_+) a_1^* on condensate-only sector state, N = 4
        let mut s = [0u32, 4, 0];
        let c = apply_word(
            &[Number(NumberFn::SqrtDepletion(4)), Create(2), Annihilate(1)],
            &mut s,
            Some(1),
        )
        .unwrap();
        // a_0 gives 2, a_1^* gives 1, then N_+ = 1 so sqrt(3)
        assert!((c - 2.0 * 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(s, [0, 3, 1]);
    }

    #[test]
    fn ccr_as_matrices_on_headroom() {
        let m = ModeSet::new(1, 1).unwrap();
        let cap = 4;
        let exc = ExcitationBasis::new(&m, cap).unwrap();
        let ms = exc.mode_count();
        let headroom: Vec<usize> = (0..exc.dim())
            .filter(|&i| exc.occupation(i).iter().sum::<u32>() < cap)
            .collect();
        for j in 0..ms {
            for k in 0..ms {
                let a_j = assemble_boson(&exc, &[Term::new(C64::new(1.0, 0.0), vec![Annihilate(j)])]);
                let ad_k = assemble_boson(&exc, &[Term::new(C64::new(1.0, 0.0), vec![Create(k)])]);
                let a_k = assemble_boson(&exc, &[Term::new(C64::new(1.0, 0.0), vec![Annihilate(k)])]);
                let comm = a_j.commutator(&ad_k).restrict(&headroom, &headroom);
                let expect = if j == k {
                    SparseMatrix::identity(headroom.len())
                } else {
                    SparseMatrix::zeros(headroom.len(), headroom.len())
                };
                assert!(comm.sub(&expect).max_abs() < 1e-13, "j={j} k={k}");
                assert_eq!(a_j.commutator(&a_k).max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn sector_to_sector_annihilation() {
        let m = ModeSet::new(1, 1).unwrap();
        let s3 = SectorBasis::new(&m, 3).unwrap();
        let s2 = SectorBasis::new(&m, 2).unwrap();
        let a0 = assemble_between(&s3, &s2, &[Term::new(C64::new(1.0, 0.0), vec![Annihilate(1)])]);
        assert_eq!(a0.nrows(), s2.dim());
        assert_eq!(a0.ncols(), s3.dim());
        let col = s3.rank(&[0, 3, 0]).unwrap();
        let row = s2.rank(&[0, 2, 0]).unwrap();
        assert!((a0.get(row, col).re - 3f64.sqrt()).abs() < 1e-15);
    }
}
