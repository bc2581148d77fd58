//! Time evolution of one initial state under the three generators, and the
//! excitation growth `alpha(t) = ||(N_+ + 1) psi(t)||^2`.

use serde::{Deserialize, Serialize};

use super::initial::{make_initial_state, InitialKind, InitialState};
use crate::error::{Error, Result};
use crate::fock::ladder::transfer;
use crate::fock::{ExcitationBasis, JointBasis, SectorBasis, StateVector};
use crate::lattice::Momentum;
use crate::operators::{
    assemble_aux, assemble_bf, assemble_full, assemble_u_map_joint, Model, SparseHermitianOperator,
    SparseMatrix,
};
use crate::propagator::{evolve_with_stats, PropagationConfig, PropagationStats};

/// Which generator drives the evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `U_N e^{-i H_N t} U_N^* Phi^{<=N}` on the N-boson sector.
    Full,
    /// `e^{-i H^aux t} Phi^{<=N}` on `N_+ <= N`.
    Aux,
    /// `e^{-i H^BF t} Phi` on `N_+ <= M`.
    Bf,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Full, Flavor::Aux, Flavor::Bf];

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Full => "full",
            Flavor::Aux => "aux",
            Flavor::Bf => "bf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Flavor::Full),
            "aux" => Ok(Flavor::Aux),
            "bf" => Ok(Flavor::Bf),
            other => Err(Error::InvalidInput(format!(
                "unknown flavor `{other}` (expected full, aux or bf)"
            ))),
        }
    }
}

/// An initial state prepared for one flavor: the generator, the starting
/// vector in the flavor's own basis, and the way back to excitations.
pub struct FlavorRun {
    pub flavor: Flavor,
    pub n: u32,
    pub hamiltonian: SparseHermitianOperator,
    pub psi0: StateVector,
    /// `||Phi - Phi^{<=N}||` (zero for the BF flavor).
    pub tail_norm: f64,
    sector: Option<(JointBasis<SectorBasis>, SparseMatrix)>,
    excitations: JointBasis<ExcitationBasis>,
    number: Vec<f64>,
    momenta: Vec<Momentum>,
}

impl FlavorRun {
    /// Prepares `initial` (defined on excitations with cap `bf_cap`) for
    /// `flavor` at the boson number of `model`.
    pub fn prepare(flavor: Flavor, model: &Model, initial: &InitialKind, bf_cap: u32) -> Result<Self> {
        let source = model.excitation_basis(bf_cap)?;
        let phi = make_initial_state(initial, &source, &model.params)?.state;
        Self::prepare_state(flavor, model, &source, &phi)
    }

    /// As [`prepare`](Self::prepare) for an arbitrary state on `source`.
    pub fn prepare_state(
        flavor: Flavor,
        model: &Model,
        source: &JointBasis<ExcitationBasis>,
        phi: &StateVector,
    ) -> Result<Self> {
        let n = model.n();
        match flavor {
            Flavor::Bf => {
                let (joint, h) = assemble_bf(model, source.boson().cap())?;
                let (psi0, _) = transfer(source, &joint, phi)?;
                Ok(Self::new(flavor, n, h, psi0, 0.0, None, joint))
            }
            Flavor::Aux => {
                let (joint, h) = assemble_aux(model)?;
                let (psi0, dropped) = transfer(source, &joint, phi)?;
                Ok(Self::new(flavor, n, h, psi0, dropped.sqrt(), None, joint))
            }
            Flavor::Full => {
                let (sector, h) = assemble_full(model)?;
                let joint = model.excitation_basis(n)?;
                let (truncated, dropped) = transfer(source, &joint, phi)?;
                let u = assemble_u_map_joint(&sector, &joint)?;
                let psi0 = StateVector::new(sector.tag(), u.adjoint().matvec(truncated.amplitudes()))?;
                Ok(Self::new(flavor, n, h, psi0, dropped.sqrt(), Some((sector, u)), joint))
            }
        }
    }

    fn new(
        flavor: Flavor,
        n: u32,
        hamiltonian: SparseHermitianOperator,
        psi0: StateVector,
        tail_norm: f64,
        sector: Option<(JointBasis<SectorBasis>, SparseMatrix)>,
        excitations: JointBasis<ExcitationBasis>,
    ) -> Self {
        let (number, momenta) = match &sector {
            Some((s, _)) => (s.number_diagonal(), s.total_momenta()),
            None => (excitations.number_diagonal(), excitations.total_momenta()),
        };
        Self { flavor, n, hamiltonian, psi0, tail_norm, sector, excitations, number, momenta }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// The excitation basis the flavor's states map to (`N_+ <= N` for the
    /// full and auxiliary flavors, `N_+ <= M` for BF).
    pub fn excitation_basis(&self) -> &JointBasis<ExcitationBasis> {
        &self.excitations
    }

    /// A state of this flavor expressed on its excitation basis.
    pub fn to_excitations(&self, state: &StateVector) -> Result<StateVector> {
        match &self.sector {
            Some((s, u)) => {
                state.ensure_same_basis(&s.tag())?;
                StateVector::new(self.excitations.tag(), u.matvec(state.amplitudes()))
            }
            None => Ok(state.clone()),
        }
    }

    /// A state of this flavor on another excitation basis with the same
    /// tracer modes; fails if weight would be lost.
    pub fn embed(&self, state: &StateVector, target: &JointBasis<ExcitationBasis>) -> Result<StateVector> {
        let exc = self.to_excitations(state)?;
        let (out, dropped) = transfer(&self.excitations, target, &exc)?;
        if dropped > 0.0 {
            return Err(Error::OutOfBasis(format!(
                "embedding drops weight {dropped:e}; target cap {} is too small",
                target.boson().cap()
            )));
        }
        Ok(out)
    }

    pub fn observe(&self, t: f64, state: &StateVector) -> Result<Observables> {
        let amps = state.amplitudes();
        let mut momentum = [0.0; 3];
        let mut alpha = 0.0;
        let mut excitations = 0.0;
        for ((a, n), p) in amps.iter().zip(&self.number).zip(&self.momenta) {
            let w = a.norm_sqr();
            alpha += w * (n + 1.0).powi(2);
            excitations += w * n;
            for (m, c) in momentum.iter_mut().zip(p.0) {
                *m += w * c as f64;
            }
        }
        Ok(Observables {
            t,
            norm: state.norm(),
            energy: self.hamiltonian.expectation(state)?,
            alpha,
            excitations,
            momentum,
        })
    }

    /// Evolves to every time of `times` (any order, any sign), starting from
    /// `psi0` at `t = 0` and stepping outwards in each direction.
    pub fn trace(&self, times: &[f64], cfg: &PropagationConfig) -> Result<Trace> {
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].abs().total_cmp(&times[b].abs()));
        let mut states: Vec<Option<StateVector>> = vec![None; times.len()];
        let mut stats = PropagationStats::default();
        for direction in [1.0, -1.0] {
            let mut current = self.psi0.clone();
            let mut t_now = 0.0;
            for &i in &order {
                let t = times[i];
                let on_side = if direction > 0.0 { t >= 0.0 } else { t < 0.0 };
                if !on_side {
                    continue;
                }
                if t != t_now {
                    let (next, s) = evolve_with_stats(&self.hamiltonian, &current, &cfg.with_time(t - t_now))?;
                    stats.substeps += s.substeps;
                    stats.matvecs += s.matvecs;
                    stats.error_estimate += s.error_estimate;
                    current = next;
                    t_now = t;
                }
                states[i] = Some(current.clone());
            }
        }
        let states: Vec<StateVector> = states.into_iter().map(|s| s.expect("every time visited")).collect();
        let observables = times
            .iter()
            .zip(&states)
            .map(|(&t, s)| self.observe(t, s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trace { states, observables, stats })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observables {
    pub t: f64,
    pub norm: f64,
    pub energy: f64,
    /// `||(N_+ + 1) psi||^2`
    pub alpha: f64,
    /// `<psi, N_+ psi>`
    pub excitations: f64,
    /// Expectation of the total momentum.
    pub momentum: [f64; 3],
}

pub struct Trace {
    pub states: Vec<StateVector>,
    pub observables: Vec<Observables>,
    pub stats: PropagationStats,
}

/// `alpha(t)` of one flavor at one boson number.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaTrace {
    pub flavor: Flavor,
    pub n: u32,
    pub times: Vec<f64>,
    pub alpha: Vec<f64>,
    pub norm_sq: Vec<f64>,
}

impl AlphaTrace {
    pub fn alpha_at_zero(&self) -> Option<f64> {
        self.times.iter().position(|&t| t == 0.0).map(|i| self.alpha[i])
    }

    /// Largest `ln(alpha(t)/alpha(0)) / |t|`, at least zero.
    pub fn growth_rate(&self) -> f64 {
        let a0 = self.alpha_at_zero().expect("trace contains t = 0");
        self.times
            .iter()
            .zip(&self.alpha)
            .filter(|(t, _)| **t != 0.0)
            .map(|(t, a)| (a / a0).ln() / t.abs())
            .fold(0.0, f64::max)
    }

    /// Largest `alpha(t) / (alpha(0) e^{v|t|})`.
    pub fn envelope_ratio(&self, v: f64) -> f64 {
        let a0 = self.alpha_at_zero().expect("trace contains t = 0");
        self.times
            .iter()
            .zip(&self.alpha)
            .map(|(t, a)| a / (a0 * (v * t.abs()).exp()))
            .fold(0.0, f64::max)
    }
}

/// `alpha(t)` on `times` (which must contain 0).
pub fn alpha_trace(
    flavor: Flavor,
    model: &Model,
    initial: &InitialKind,
    bf_cap: u32,
    times: &[f64],
    cfg: &PropagationConfig,
) -> Result<AlphaTrace> {
    if !times.contains(&0.0) {
        return Err(Error::InvalidInput("the time grid must contain t = 0".into()));
    }
    let run = FlavorRun::prepare(flavor, model, initial, bf_cap)?;
    let trace = run.trace(times, cfg)?;
    Ok(AlphaTrace {
        flavor,
        n: model.n(),
        times: times.to_vec(),
        alpha: trace.observables.iter().map(|o| o.alpha).collect(),
        norm_sq: trace.observables.iter().map(|o| o.norm * o.norm).collect(),
    })
}

/// One rate for all traces: the largest individual growth rate.
pub fn fit_growth_rate(traces: &[AlphaTrace]) -> f64 {
    traces.iter().map(AlphaTrace::growth_rate).fold(0.0, f64::max)
}

/// `n + 1` points uniformly on `[0, t_max]`.
pub fn uniform_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| t_max * i as f64 / n as f64).collect()
}

/// Initial state metadata on the BF basis.
pub fn initial_metadata(model: &Model, initial: &InitialKind, bf_cap: u32) -> Result<InitialState> {
    let joint = model.excitation_basis(bf_cap)?;
    make_initial_state(initial, &joint, &model.params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{preset_potential, ModeSet, ModelParams, PotentialKind};

    fn model(n: u32, v: &str, w: &str) -> Model {
        let modes = ModeSet::new(1, 1).unwrap();
        Model::new(
            modes.clone(),
            preset_potential(v, PotentialKind::Pair, &modes, 1.0).unwrap(),
            preset_potential(w, PotentialKind::Tracer, &modes, 1.0).unwrap(),
            ModelParams::new(n, 1.0, 2).unwrap(),
        )
        .unwrap()
    }

    fn single() -> InitialKind {
        InitialKind::Single { p: Momentum::unit(0), q: Momentum::ZERO }
    }

    #[test]
    fn free_alpha_is_constant() {
        let times = uniform_grid(2.0, 8);
        for flavor in Flavor::ALL {
            let a = alpha_trace(flavor, &model(4, "zero", "zero"), &single(), 4, &times, &PropagationConfig::new(0.0))
                .unwrap();
            for x in &a.alpha {
                assert!((x - 4.0).abs() < 1e-10, "{flavor:?}: {x}");
            }
        }
    }

    #[test]
    fn coupled_alpha_grows_from_vacuum() {
        let times = [0.0, 0.5, 1.0, -1.0];
        let init = InitialKind::VacuumGaussian { width: 1.0 };
        let a = alpha_trace(Flavor::Bf, &model(4, "soft", "soft"), &init, 6, &times, &PropagationConfig::new(0.0))
            .unwrap();
        assert!((a.alpha[0] - 1.0).abs() < 1e-14);
        assert!(a.alpha[2] > 1.0);
        let v = a.growth_rate();
        assert!(a.envelope_ratio(v) <= 1.0 + 1e-12);
        for (x, n) in a.alpha.iter().zip(&a.norm_sq) {
            assert!(*x >= *n - 1e-12);
        }
    }

    #[test]
    fn full_flavor_round_trips_through_the_sector() {
        let m = model(3, "soft", "soft");
        let run = FlavorRun::prepare(Flavor::Full, &m, &single(), 3).unwrap();
        let back = run.to_excitations(&run.psi0).unwrap();
        let aux = FlavorRun::prepare(Flavor::Aux, &m, &single(), 3).unwrap();
        assert!(back.distance(&aux.psi0).unwrap() < 1e-15);
    }
}
