//! The Hamiltonians of the model in plane-wave realization.
//!
//! Coefficient conventions (momenta `k_j` of the mode set):
//!
//! * `V_{jklm} = V(k_j - k_m)` if `k_j + k_k = k_l + k_m`, else 0;
//! * `(W_x)_{jk} = W(k_k - k_j)` together with the tracer shift `k_k - k_j`.
//!
//! Term builders return [`Term`] lists in the local mode indices of the basis
//! they are meant for; assemblers turn them into checked Hermitian operators.

use num_complex::Complex64 as C64;

use super::sparse::{SparseHermitianOperator, SparseMatrix};
use super::terms::{assemble_boson, assemble_joint, Factor, NumberFn, Term};
use crate::error::{Error, Result};
use crate::fock::{ExcitationBasis, JointBasis, OccupationBasis, SectorBasis};
use crate::lattice::{
    kinetic_energy, ModeSet, ModelParams, Momentum, PotentialKind, PotentialSpec,
    DEFAULT_BASIS_LIMIT,
};

use Factor::{Annihilate as A, Create as Cr, Number};

/// Modes, potentials and parameters of one instance of the model.
#[derive(Clone, Debug)]
pub struct Model {
    pub modes: ModeSet,
    pub v: PotentialSpec,
    pub w: PotentialSpec,
    pub params: ModelParams,
}

impl Model {
    pub fn new(modes: ModeSet, v: PotentialSpec, w: PotentialSpec, params: ModelParams) -> Result<Self> {
        if v.kind() != PotentialKind::Pair || w.kind() != PotentialKind::Tracer {
            return Err(Error::Potential(
                "expected a pair potential V and a tracer potential W".into(),
            ));
        }
        if v.dim() != modes.dim() || w.dim() != modes.dim() {
            return Err(Error::Potential(format!(
                "potential dimension does not match the mode set (d = {})",
                modes.dim()
            )));
        }
        Ok(Self { modes, v, w, params })
    }

    /// The same model with a different boson number.
    pub fn with_bosons(&self, n: u32) -> Result<Self> {
        let params = ModelParams::new(n, self.params.tracer_mass, self.params.tracer_cutoff)?;
        Ok(Self { params, ..self.clone() })
    }

    pub fn n(&self) -> u32 {
        self.params.n_bosons
    }

    pub fn tracer_modes(&self) -> Result<ModeSet> {
        ModeSet::new(self.modes.dim(), self.params.tracer_cutoff)
    }

    pub fn sector_basis(&self) -> Result<JointBasis<SectorBasis>> {
        let tracer = self.tracer_modes()?;
        let boson = SectorBasis::new(&self.modes, self.n())?;
        joint_checked(tracer, boson)
    }

    pub fn excitation_basis(&self, cap: u32) -> Result<JointBasis<ExcitationBasis>> {
        let tracer = self.tracer_modes()?;
        let boson = ExcitationBasis::new(&self.modes, cap)?;
        joint_checked(tracer, boson)
    }
}

fn joint_checked<B: OccupationBasis>(tracer: ModeSet, boson: B) -> Result<JointBasis<B>> {
    let requested = tracer.len() as u128 * boson.dim() as u128;
    if requested > DEFAULT_BASIS_LIMIT as u128 {
        return Err(Error::DimensionLimit { requested, limit: DEFAULT_BASIS_LIMIT });
    }
    Ok(JointBasis::new(tracer, boson))
}

/// `V_{jklm}` for mode-set indices.
pub fn v_coefficient(modes: &ModeSet, v: &PotentialSpec, j: usize, k: usize, l: usize, m: usize) -> C64 {
    let [kj, kk, kl, km] = [j, k, l, m].map(|i| modes.momentum(i));
    if kj + kk != kl + km {
        return C64::default();
    }
    v.coeff(kj - km)
}

/// `(W_x)_{jk}` without the tracer factor, and its tracer shift.
pub fn w_coefficient(modes: &ModeSet, w: &PotentialSpec, j: usize, k: usize) -> (C64, Momentum) {
    let p = modes.momentum(k) - modes.momentum(j);
    (w.coeff(p), p)
}

fn local<B: OccupationBasis>(basis: &B, global: usize) -> usize {
    basis
        .local_mode(global)
        .unwrap_or_else(|| panic!("mode {global} is not carried by {}", basis.descriptor()))
}

fn nonzero(c: C64) -> bool {
    c.norm() > 0.0
}

/// `sum_k eps(k) a_k^* a_k` over the modes carried by `basis`.
pub fn kinetic_terms<B: OccupationBasis>(basis: &B) -> Vec<Term> {
    (0..basis.mode_count())
        .filter_map(|l| {
            let e = kinetic_energy(basis.mode_momentum(l));
            (e != 0.0).then(|| Term::new(C64::new(e, 0.0), vec![Cr(l), A(l)]))
        })
        .collect()
}

/// `sum V_{jklm} a_j^* a_k^* a_l a_m` over the index quadruples whose pattern
/// of condensate positions `[j = 0, k = 0, l = 0, m = 0]` passes `select`.
pub fn pair_interaction_terms<B, F>(basis: &B, v: &PotentialSpec, select: F) -> Vec<Term>
where
    B: OccupationBasis,
    F: Fn([bool; 4]) -> bool,
{
    let modes = basis.mode_set();
    let carried: Vec<usize> = (0..basis.mode_count()).map(|l| basis.global_mode(l)).collect();
    let zero = modes.zero_index();
    let mut out = Vec::new();
    for &j in &carried {
        for &k in &carried {
            for &l in &carried {
                let km = modes.momentum(j) + modes.momentum(k) - modes.momentum(l);
                let Some(m) = modes.index_of(km) else { continue };
                if basis.local_mode(m).is_none() || !select([j, k, l, m].map(|i| i == zero)) {
                    continue;
                }
                let c = v_coefficient(modes, v, j, k, l, m);
                if nonzero(c) {
                    let f = [j, k, l, m].map(|i| local(basis, i));
                    out.push(Term::new(c, vec![Cr(f[0]), Cr(f[1]), A(f[2]), A(f[3])]));
                }
            }
        }
    }
    out
}

/// `sum (W_x)_{jk} a_j^* a_k` over pairs whose pattern `[j = 0, k = 0]` passes
/// `select`.
pub fn tracer_coupling_terms<B, F>(basis: &B, w: &PotentialSpec, select: F) -> Vec<Term>
where
    B: OccupationBasis,
    F: Fn([bool; 2]) -> bool,
{
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let mut out = Vec::new();
    for lj in 0..basis.mode_count() {
        for lk in 0..basis.mode_count() {
            let (j, k) = (basis.global_mode(lj), basis.global_mode(lk));
            if !select([j == zero, k == zero]) {
                continue;
            }
            let (c, shift) = w_coefficient(modes, w, j, k);
            if nonzero(c) {
                out.push(Term::shifted(c, vec![Cr(lj), A(lk)], shift));
            }
        }
    }
    out
}

/// How the condensate factors of the auxiliary Hamiltonian are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depletion {
    /// `sqrt(N - N_+)` and `N - N_+` exactly, as diagonal functions of `N_+`.
    Exact,
    /// `sqrt(N - N_+)` replaced by `sqrt(N)` and `N - N_+` by `N`.
    Unity,
}

fn excited(modes: &ModeSet) -> Vec<usize> {
    modes.nonzero_indices()
}

/// `2 sum V_{j0k0} (N - N_+) a_j^* a_k` on an excitation basis.
pub fn v_number_terms(basis: &ExcitationBasis, v: &PotentialSpec, n: u32, depletion: Depletion) -> Vec<Term> {
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let mut out = Vec::new();
    for &j in &excited(modes) {
        for &k in &excited(modes) {
            let c = v_coefficient(modes, v, j, zero, k, zero) * 2.0;
            if !nonzero(c) {
                continue;
            }
            let (lj, lk) = (local(basis, j), local(basis, k));
            out.push(match depletion {
                Depletion::Exact => Term::new(c, vec![Number(NumberFn::Depletion(n)), Cr(lj), A(lk)]),
                Depletion::Unity => Term::new(c * n as f64, vec![Cr(lj), A(lk)]),
            });
        }
    }
    out
}

/// The same operator with the depletion factor placed between the ladder
/// operators, `2 sum V_{j0k0} a_j^* (N - N_+) a_k`.
pub fn v_number_terms_inner(basis: &ExcitationBasis, v: &PotentialSpec, n: u32) -> Vec<Term> {
    v_number_terms(basis, v, n, Depletion::Exact)
        .into_iter()
        .map(|mut t| {
            t.factors.swap(0, 1);
            t
        })
        .collect()
}

/// `sum V_{jk00} a_j^* sqrt(N - N_+) a_k^* sqrt(N - N_+)`.
pub fn v_pair_creation_terms(basis: &ExcitationBasis, v: &PotentialSpec, n: u32, depletion: Depletion) -> Vec<Term> {
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let sq = Number(NumberFn::SqrtDepletion(n));
    let mut out = Vec::new();
    for &j in &excited(modes) {
        for &k in &excited(modes) {
            let c = v_coefficient(modes, v, j, k, zero, zero);
            if !nonzero(c) {
                continue;
            }
            let (lj, lk) = (local(basis, j), local(basis, k));
            out.push(match depletion {
                Depletion::Exact => Term::new(c, vec![Cr(lj), sq, Cr(lk), sq]),
                Depletion::Unity => Term::new(c * n as f64, vec![Cr(lj), Cr(lk)]),
            });
        }
    }
    out
}

/// `sum V_{00jk} sqrt(N - N_+) a_j sqrt(N - N_+) a_k`.
pub fn v_pair_annihilation_terms(basis: &ExcitationBasis, v: &PotentialSpec, n: u32, depletion: Depletion) -> Vec<Term> {
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let sq = Number(NumberFn::SqrtDepletion(n));
    let mut out = Vec::new();
    for &j in &excited(modes) {
        for &k in &excited(modes) {
            let c = v_coefficient(modes, v, zero, zero, j, k);
            if !nonzero(c) {
                continue;
            }
            let (lj, lk) = (local(basis, j), local(basis, k));
            out.push(match depletion {
                Depletion::Exact => Term::new(c, vec![sq, A(lj), sq, A(lk)]),
                Depletion::Unity => Term::new(c * n as f64, vec![A(lj), A(lk)]),
            });
        }
    }
    out
}

/// `2 sum (V_{jkl0} a_j^* sqrt(N - N_+) a_k^* a_l + V_{0jkl} a_j^* a_k sqrt(N - N_+) a_l)`.
pub fn v_cubic_terms(basis: &ExcitationBasis, v: &PotentialSpec, n: u32) -> Vec<Term> {
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let sq = Number(NumberFn::SqrtDepletion(n));
    let ex = excited(modes);
    let mut out = Vec::new();
    for &j in &ex {
        for &k in &ex {
            for &l in &ex {
                let (lj, lk, ll) = (local(basis, j), local(basis, k), local(basis, l));
                let c = v_coefficient(modes, v, j, k, l, zero) * 2.0;
                if nonzero(c) {
                    out.push(Term::new(c, vec![Cr(lj), sq, Cr(lk), A(ll)]));
                }
                let c = v_coefficient(modes, v, zero, j, k, l) * 2.0;
                if nonzero(c) {
                    out.push(Term::new(c, vec![Cr(lj), A(lk), sq, A(ll)]));
                }
            }
        }
    }
    out
}

/// `sum V_{jklm} a_j^* a_k^* a_l a_m` over excited modes only.
pub fn v_quartic_terms(basis: &ExcitationBasis, v: &PotentialSpec) -> Vec<Term> {
    pair_interaction_terms(basis, v, |_| true)
}

/// `a^*(W_x) sqrt(N - N_+) = sum_k W(-k) e^{-ikx} a_k^* sqrt(N - N_+)`.
pub fn w_creation_terms(basis: &ExcitationBasis, w: &PotentialSpec, n: u32, depletion: Depletion) -> Vec<Term> {
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let mut out = Vec::new();
    for &k in &excited(modes) {
        let (c, shift) = w_coefficient(modes, w, k, zero);
        if !nonzero(c) {
            continue;
        }
        let lk = local(basis, k);
        out.push(match depletion {
            Depletion::Exact => Term::shifted(c, vec![Cr(lk), Number(NumberFn::SqrtDepletion(n))], shift),
            Depletion::Unity => Term::shifted(c * (n as f64).sqrt(), vec![Cr(lk)], shift),
        });
    }
    out
}

/// `sqrt(N - N_+) a(W_x) = sum_k W(k) e^{ikx} sqrt(N - N_+) a_k`.
pub fn w_annihilation_terms(basis: &ExcitationBasis, w: &PotentialSpec, n: u32, depletion: Depletion) -> Vec<Term> {
    let modes = basis.mode_set();
    let zero = modes.zero_index();
    let mut out = Vec::new();
    for &k in &excited(modes) {
        let (c, shift) = w_coefficient(modes, w, zero, k);
        if !nonzero(c) {
            continue;
        }
        let lk = local(basis, k);
        out.push(match depletion {
            Depletion::Exact => Term::shifted(c, vec![Number(NumberFn::SqrtDepletion(n)), A(lk)], shift),
            Depletion::Unity => Term::shifted(c * (n as f64).sqrt(), vec![A(lk)], shift),
        });
    }
    out
}

/// `dGamma(Q W_x Q) = sum_{j,k excited} (W_x)_{jk} a_j^* a_k`.
pub fn w_scattering_terms<B: OccupationBasis>(basis: &B, w: &PotentialSpec) -> Vec<Term> {
    tracer_coupling_terms(basis, w, |[j0, k0]| !j0 && !k0)
}

fn scale_all(terms: Vec<Term>, factor: f64) -> impl Iterator<Item = Term> {
    terms.into_iter().map(move |t| t.scaled(factor))
}

fn finish<B: OccupationBasis>(joint: &JointBasis<B>, matrix: SparseMatrix) -> Result<SparseHermitianOperator> {
    SparseHermitianOperator::new(joint.tag(), matrix)
}

/// The many-body Hamiltonian
/// `H_N = -Delta_x / 2m + dGamma(-Delta) + N^{-1} sum V_{jklm} a_j^* a_k^* a_l a_m
///        + N^{-1/2} sum (W_x)_{jk} a_j^* a_k`
/// on tracer modes tensored with the N-boson sector.
pub fn assemble_full(model: &Model) -> Result<(JointBasis<SectorBasis>, SparseHermitianOperator)> {
    let joint = model.sector_basis()?;
    let boson = joint.boson();
    let n = model.n() as f64;
    let mut terms = kinetic_terms(boson);
    terms.extend(scale_all(pair_interaction_terms(boson, &model.v, |_| true), 1.0 / n));
    terms.extend(scale_all(tracer_coupling_terms(boson, &model.w, |_| true), n.sqrt().recip()));
    let params = model.params;
    let h = assemble_joint(&joint, &terms, |q, _| params.tracer_kinetic(q));
    let op = finish(&joint, h)?;
    Ok((joint, op))
}

/// Terms of the auxiliary Hamiltonian acting on the excitation space, without
/// the tracer kinetic energy.
pub fn aux_terms(basis: &ExcitationBasis, model: &Model, depletion: Depletion) -> Vec<Term> {
    let n = model.n();
    let nf = n as f64;
    let mut terms = kinetic_terms(basis);
    let quad = [
        v_number_terms(basis, &model.v, n, depletion),
        v_pair_creation_terms(basis, &model.v, n, depletion),
        v_pair_annihilation_terms(basis, &model.v, n, depletion),
    ];
    for q in quad {
        terms.extend(scale_all(q, 1.0 / nf));
    }
    terms.extend(scale_all(w_creation_terms(basis, &model.w, n, depletion), nf.sqrt().recip()));
    terms.extend(scale_all(w_annihilation_terms(basis, &model.w, n, depletion), nf.sqrt().recip()));
    terms
}

/// The auxiliary Hamiltonian on tracer modes tensored with excitations
/// `N_+ <= N`.
pub fn assemble_aux(model: &Model) -> Result<(JointBasis<ExcitationBasis>, SparseHermitianOperator)> {
    assemble_aux_with(model, Depletion::Exact)
}

pub fn assemble_aux_with(
    model: &Model,
    depletion: Depletion,
) -> Result<(JointBasis<ExcitationBasis>, SparseHermitianOperator)> {
    let joint = model.excitation_basis(model.n())?;
    let terms = aux_terms(joint.boson(), model, depletion);
    let params = model.params;
    let h = assemble_joint(&joint, &terms, |q, _| params.tracer_kinetic(q));
    let op = finish(&joint, h)?;
    Ok((joint, op))
}

/// Terms of `H^Bog = dGamma(-Delta) + 2 sum V(p) a_p^* a_p + sum V(p) (a_p^* a_{-p}^* + a_p a_{-p})`.
pub fn bog_terms(basis: &ExcitationBasis, v: &PotentialSpec) -> Vec<Term> {
    let mut terms = kinetic_terms(basis);
    // the Bogoliubov terms are the auxiliary quadratic terms at N = 1 with
    // the depletion factors replaced by one
    terms.extend(v_number_terms(basis, v, 1, Depletion::Unity));
    terms.extend(v_pair_creation_terms(basis, v, 1, Depletion::Unity));
    terms.extend(v_pair_annihilation_terms(basis, v, 1, Depletion::Unity));
    terms
}

/// `H^Bog` on the excitation basis with cap `M`.
pub fn assemble_bog(modes: &ModeSet, v: &PotentialSpec, cap: u32) -> Result<(ExcitationBasis, SparseHermitianOperator)> {
    if v.kind() != PotentialKind::Pair {
        return Err(Error::Potential("H^Bog needs a pair potential".into()));
    }
    let basis = ExcitationBasis::new(modes, cap)?;
    let h = assemble_boson(&basis, &bog_terms(&basis, v));
    let op = SparseHermitianOperator::new(basis.tag(), h)?;
    Ok((basis, op))
}

/// `H^BF = -Delta_x / 2m + H^Bog + a^*(W_x) + a(W_x)` with excitation cap `M`.
pub fn assemble_bf(model: &Model, cap: u32) -> Result<(JointBasis<ExcitationBasis>, SparseHermitianOperator)> {
    let joint = model.excitation_basis(cap)?;
    let boson = joint.boson();
    let mut terms = bog_terms(boson, &model.v);
    terms.extend(w_creation_terms(boson, &model.w, 1, Depletion::Unity));
    terms.extend(w_annihilation_terms(boson, &model.w, 1, Depletion::Unity));
    let params = model.params;
    let h = assemble_joint(&joint, &terms, |q, _| params.tracer_kinetic(q));
    let op = finish(&joint, h)?;
    Ok((joint, op))
}

/// `dGamma(Q W_x Q)` on a joint excitation basis.
pub fn assemble_dgamma_w(w: &PotentialSpec, joint: &JointBasis<ExcitationBasis>) -> Result<SparseHermitianOperator> {
    if w.kind() != PotentialKind::Tracer {
        return Err(Error::Potential("dGamma(QW_xQ) needs a tracer potential".into()));
    }
    let terms = w_scattering_terms(joint.boson(), w);
    finish(joint, assemble_joint(joint, &terms, |_, _| 0.0))
}

/// `N_+` on a joint basis, as a diagonal operator.
pub fn number_operator<B: OccupationBasis>(joint: &JointBasis<B>) -> SparseHermitianOperator {
    SparseHermitianOperator::new(joint.tag(), SparseMatrix::from_diagonal(&joint.number_diagonal()))
        .expect("diagonal real matrices are Hermitian")
}
