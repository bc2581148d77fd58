//! The excitation map `U_N` from the N-boson sector to the excitation space
//! with `N_+ <= N`, and the term-by-term pieces of the transformed
//! interactions.

use num_complex::Complex64 as C64;

use super::hamiltonians::{
    pair_interaction_terms, tracer_coupling_terms, v_cubic_terms, v_number_terms,
    v_pair_annihilation_terms, v_pair_creation_terms, v_quartic_terms, w_annihilation_terms,
    w_creation_terms, w_scattering_terms, Depletion,
};
use super::sparse::SparseMatrix;
use super::terms::Term;
use crate::error::{Error, Result};
use crate::fock::{ExcitationBasis, JointBasis, OccupationBasis, SectorBasis};
use crate::lattice::PotentialSpec;

/// `U_N` as a matrix with rows indexed by `excitations` and columns by
/// `sector`. The sector state `|n_0, {n_k}>` goes to `|{n_k}>` with
/// coefficient one.
pub fn assemble_u_map(sector: &SectorBasis, excitations: &ExcitationBasis) -> Result<SparseMatrix> {
    if excitations.cap() != sector.n_bosons() {
        return Err(Error::InvalidInput(format!(
            "excitation cap {} must equal the boson number {}",
            excitations.cap(),
            sector.n_bosons()
        )));
    }
    if sector.mode_set() != excitations.mode_set() {
        return Err(Error::BasisMismatch {
            expected: sector.descriptor(),
            found: excitations.descriptor(),
        });
    }
    let mut sec = vec![0u32; sector.mode_count()];
    let mut exc = vec![0u32; excitations.mode_count()];
    let mut triplets = Vec::with_capacity(sector.dim());
    for col in 0..sector.dim() {
        sector.unrank_into(col, &mut sec);
        for (l, slot) in exc.iter_mut().enumerate() {
            *slot = sec[excitations.global_mode(l)];
        }
        let row = excitations
            .rank(&exc)
            .expect("an N-boson state has at most N excitations");
        triplets.push((row, col, C64::new(1.0, 0.0)));
    }
    Ok(SparseMatrix::from_triplets(excitations.dim(), sector.dim(), triplets))
}

/// `1 (x) U_N` on joint bases with the same tracer modes.
pub fn assemble_u_map_joint(
    sector: &JointBasis<SectorBasis>,
    excitations: &JointBasis<ExcitationBasis>,
) -> Result<SparseMatrix> {
    if sector.tracer() != excitations.tracer() {
        return Err(Error::BasisMismatch {
            expected: sector.descriptor(),
            found: excitations.descriptor(),
        });
    }
    let u = assemble_u_map(sector.boson(), excitations.boson())?;
    Ok(u.kron_identity_left(sector.tracer().len()))
}

/// `U A U^*`.
pub fn conjugate(u: &SparseMatrix, a: &SparseMatrix) -> SparseMatrix {
    u.matmul(a).matmul(&u.adjoint())
}

/// The five groups of the transformed pair interaction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VTerm {
    /// `2 sum V_{j0k0} (N - N_+) a_j^* a_k`
    Number,
    /// `sum V_{jk00} a_j^* sqrt(N - N_+) a_k^* sqrt(N - N_+)`
    PairCreation,
    /// `sum V_{00jk} sqrt(N - N_+) a_j sqrt(N - N_+) a_k`
    PairAnnihilation,
    /// `2 sum (V_{jkl0} a_j^* sqrt(N - N_+) a_k^* a_l + V_{0jkl} a_j^* a_k sqrt(N - N_+) a_l)`
    Cubic,
    /// `sum V_{jklm} a_j^* a_k^* a_l a_m` over excited modes
    Quartic,
}

impl VTerm {
    pub const ALL: [VTerm; 5] = [
        VTerm::Number,
        VTerm::PairCreation,
        VTerm::PairAnnihilation,
        VTerm::Cubic,
        VTerm::Quartic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VTerm::Number => "v-number",
            VTerm::PairCreation => "v-pair-creation",
            VTerm::PairAnnihilation => "v-pair-annihilation",
            VTerm::Cubic => "v-cubic",
            VTerm::Quartic => "v-quartic",
        }
    }

    /// Which condensate patterns `[j = 0, k = 0, l = 0, m = 0]` of the
    /// sector sum `sum V_{jklm} a_j^* a_k^* a_l a_m` this group comes from.
    pub fn selects(self, zeros: [bool; 4]) -> bool {
        let count = zeros.iter().filter(|&&z| z).count();
        match self {
            VTerm::Number => zeros == [false, true, false, true] || zeros == [true, false, true, false],
            VTerm::PairCreation => zeros == [false, false, true, true],
            VTerm::PairAnnihilation => zeros == [true, true, false, false],
            VTerm::Cubic => count == 1,
            VTerm::Quartic => count == 0,
        }
    }

    /// Excitation-side terms.
    pub fn rhs(self, basis: &ExcitationBasis, v: &PotentialSpec, n: u32) -> Vec<Term> {
        match self {
            VTerm::Number => v_number_terms(basis, v, n, Depletion::Exact),
            VTerm::PairCreation => v_pair_creation_terms(basis, v, n, Depletion::Exact),
            VTerm::PairAnnihilation => v_pair_annihilation_terms(basis, v, n, Depletion::Exact),
            VTerm::Cubic => v_cubic_terms(basis, v, n),
            VTerm::Quartic => v_quartic_terms(basis, v),
        }
    }

    /// Sector-side terms.
    pub fn lhs(self, sector: &SectorBasis, v: &PotentialSpec) -> Vec<Term> {
        pair_interaction_terms(sector, v, |z| self.selects(z))
    }
}

/// Sector terms of `sum V_{jklm} a_j^* a_k^* a_l a_m` not covered by any
/// group; these vanish for zero-mean potentials.
pub fn v_remainder_lhs(sector: &SectorBasis, v: &PotentialSpec) -> Vec<Term> {
    pair_interaction_terms(sector, v, |z| !VTerm::ALL.iter().any(|t| t.selects(z)))
}

/// The three groups of the transformed tracer coupling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WTerm {
    /// `sqrt(N - N_+) a(W_x)`
    Annihilation,
    /// `a^*(W_x) sqrt(N - N_+)`
    Creation,
    /// `dGamma(Q W_x Q)`
    Scattering,
}

impl WTerm {
    pub const ALL: [WTerm; 3] = [WTerm::Annihilation, WTerm::Creation, WTerm::Scattering];

    pub fn name(self) -> &'static str {
        match self {
            WTerm::Annihilation => "w-annihilation",
            WTerm::Creation => "w-creation",
            WTerm::Scattering => "w-scattering",
        }
    }

    pub fn selects(self, zeros: [bool; 2]) -> bool {
        match self {
            WTerm::Annihilation => zeros == [true, false],
            WTerm::Creation => zeros == [false, true],
            WTerm::Scattering => zeros == [false, false],
        }
    }

    pub fn rhs(self, basis: &ExcitationBasis, w: &PotentialSpec, n: u32) -> Vec<Term> {
        match self {
            WTerm::Annihilation => w_annihilation_terms(basis, w, n, Depletion::Exact),
            WTerm::Creation => w_creation_terms(basis, w, n, Depletion::Exact),
            WTerm::Scattering => w_scattering_terms(basis, w),
        }
    }

    pub fn lhs(self, sector: &SectorBasis, w: &PotentialSpec) -> Vec<Term> {
        tracer_coupling_terms(sector, w, |z| self.selects(z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ModeSet;

    #[test]
    fn u_map_is_a_permutation() {
        let m = ModeSet::new(1, 1).unwrap();
        for n in 1..=5 {
            let s = SectorBasis::new(&m, n).unwrap();
            let e = ExcitationBasis::new(&m, n).unwrap();
            let u = assemble_u_map(&s, &e).unwrap();
            assert_eq!(u.nnz(), s.dim());
            let uu = u.adjoint().matmul(&u);
            assert!(uu.sub(&SparseMatrix::identity(s.dim())).max_abs() < 1e-14);
            let cond = s.rank(&[0, n, 0]).unwrap();
            assert_eq!(u.get(0, cond), C64::new(1.0, 0.0));
            if n >= 2 {
                let pair = s.rank(&[1, n - 2, 1]).unwrap();
                assert_eq!(u.get(e.rank(&[1, 1]).unwrap(), pair), C64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn u_map_rejects_wrong_cap() {
        let m = ModeSet::new(1, 1).unwrap();
        let s = SectorBasis::new(&m, 3).unwrap();
        let e = ExcitationBasis::new(&m, 2).unwrap();
        assert!(assemble_u_map(&s, &e).is_err());
    }

    #[test]
    fn groups_partition_nonvanishing_patterns() {
        for bits in 0u8..16 {
            let z = [0, 1, 2, 3].map(|i| bits >> i & 1 == 1);
            let hits = VTerm::ALL.iter().filter(|t| t.selects(z)).count();
            assert!(hits <= 1);
        }
    }
}
