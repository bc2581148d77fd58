//! Error curves against the boson number: the total error between the
//! many-body and the Bogoliubov-Froehlich evolutions, the two intermediate
//! gaps through the auxiliary generator, and the bound checks on them.

use rayon::prelude::*;
use serde::Serialize;

use super::dynamics::{Flavor, FlavorRun};
use super::initial::{make_initial_state, InitialKind};
use crate::error::{Error, Result};
use crate::fock::ladder::transfer;
use crate::fock::{ExcitationBasis, JointBasis, StateVector};
use crate::operators::Model;
use crate::propagator::PropagationConfig;

/// Slack on "error is nonincreasing in N".
pub const MONOTONE_SLACK: f64 = 0.10;
/// Points whose error is below this multiple of the noise floor are left
/// out of the log-log fit.
pub const NOISE_FACTOR: f64 = 10.0;
pub const RATE_EXPONENT: f64 = -0.25;
pub const DOUBLING_TOL: f64 = 1e-6;

/// Everything an error curve holds fixed.
#[derive(Clone, Debug)]
pub struct ConvergenceSetup {
    /// Modes, potentials and tracer data; the boson number is replaced per cell.
    pub model: Model,
    pub initial: InitialKind,
    pub time: f64,
    /// Excitation cap of the BF reference.
    pub bf_cap: u32,
    pub propagation: PropagationConfig,
}

impl ConvergenceSetup {
    /// Distance two independently propagated states can differ by from
    /// propagation error alone.
    pub fn noise_floor(&self) -> f64 {
        2.0 * self.propagation.tolerance * self.time.abs()
    }
}

/// `e^{-i H^BF t} Phi`, shared by every cell of a curve.
pub struct BfReference {
    pub phi: StateVector,
    pub basis: JointBasis<ExcitationBasis>,
    pub evolved: StateVector,
    pub dim: usize,
    pub h0_norm: f64,
    pub excitation_norm: f64,
}

impl BfReference {
    pub fn compute(setup: &ConvergenceSetup) -> Result<Self> {
        Self::with_cap(setup, setup.bf_cap)
    }

    pub fn with_cap(setup: &ConvergenceSetup, cap: u32) -> Result<Self> {
        let basis = setup.model.excitation_basis(cap)?;
        let init = make_initial_state(&setup.initial, &basis, &setup.model.params)?;
        let run = FlavorRun::prepare_state(Flavor::Bf, &setup.model, &basis, &init.state)?;
        let evolved = run.trace(&[setup.time], &setup.propagation)?.states.remove(0);
        Ok(Self {
            dim: run.dim(),
            phi: init.state,
            basis,
            evolved,
            h0_norm: init.h0_norm,
            excitation_norm: init.excitation_norm,
        })
    }
}

/// `||psi_M(t) - psi_2M(t)||` for the BF evolution.
pub fn bf_doubling_deviation(setup: &ConvergenceSetup) -> Result<f64> {
    let small = BfReference::with_cap(setup, setup.bf_cap)?;
    let large = BfReference::with_cap(setup, 2 * setup.bf_cap)?;
    let (embedded, _) = transfer(&small.basis, &large.basis, &small.evolved)?;
    embedded.distance(&large.evolved)
}

/// One boson number of a convergence sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceCell {
    pub n: u32,
    /// `||U_N e^{-i H_N t} U_N^* Phi^{<=N} - e^{-i H^BF t} Phi||`
    pub total: f64,
    /// `||U_N e^{-i H_N t} U_N^* Phi^{<=N} - e^{-i H^aux t} Phi^{<=N}||`
    pub gap_aux: f64,
    /// `||e^{-i H^aux t} Phi^{<=N} - e^{-i H^BF t} Phi||`
    pub gap_aux_bf: f64,
    /// `||Phi - Phi^{<=N}||`
    pub tail: f64,
    pub sector_dim: usize,
    pub aux_dim: usize,
    pub bf_dim: usize,
    pub substeps: usize,
    pub matvecs: usize,
}

impl ConvergenceCell {
    /// `total - gap_aux - gap_aux_bf`, which the triangle inequality makes
    /// nonpositive up to rounding.
    pub fn triangle_excess(&self) -> f64 {
        self.total - self.gap_aux - self.gap_aux_bf
    }
}

pub fn convergence_cell(setup: &ConvergenceSetup, n: u32, reference: &BfReference) -> Result<ConvergenceCell> {
    let model = setup.model.with_bosons(n)?;
    let full = FlavorRun::prepare_state(Flavor::Full, &model, &reference.basis, &reference.phi)?;
    let aux = FlavorRun::prepare_state(Flavor::Aux, &model, &reference.basis, &reference.phi)?;
    let times = [setup.time];
    let full_trace = full.trace(&times, &setup.propagation)?;
    let aux_trace = aux.trace(&times, &setup.propagation)?;

    let common = model.excitation_basis(n.max(setup.bf_cap))?;
    let psi_full = full.embed(&full_trace.states[0], &common)?;
    let psi_aux = aux.embed(&aux_trace.states[0], &common)?;
    let (psi_bf, dropped) = transfer(&reference.basis, &common, &reference.evolved)?;
    debug_assert_eq!(dropped, 0.0);

    Ok(ConvergenceCell {
        n,
        total: psi_full.distance(&psi_bf)?,
        gap_aux: psi_full.distance(&psi_aux)?,
        gap_aux_bf: psi_aux.distance(&psi_bf)?,
        tail: aux.tail_norm,
        sector_dim: full.dim(),
        aux_dim: aux.dim(),
        bf_dim: reference.dim,
        substeps: full_trace.stats.substeps + aux_trace.stats.substeps,
        matvecs: full_trace.stats.matvecs + aux_trace.stats.matvecs,
    })
}

/// Runs every cell on the current rayon pool. Cells that fail are returned
/// as errors in place, so completed cells survive a partial failure.
pub fn convergence_cells(setup: &ConvergenceSetup, n_list: &[u32]) -> Result<(BfReference, Vec<Result<ConvergenceCell>>)> {
    check_n_list(n_list)?;
    let reference = BfReference::compute(setup)?;
    let cells = n_list.par_iter().map(|&n| convergence_cell(setup, n, &reference)).collect();
    Ok((reference, cells))
}

fn check_n_list(n_list: &[u32]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidInput("the N list is empty".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(format!("N values must be strictly increasing, got {n_list:?}")));
    }
    if n_list[0] == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    Ok(())
}

/// Least squares line through `(ln N, ln error)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub prefactor: f64,
    /// N values used.
    pub window: Vec<u32>,
}

/// Fit over the points whose error exceeds `NOISE_FACTOR * noise_floor`;
/// `None` with fewer than two such points.
pub fn loglog_fit(points: &[(u32, f64)], noise_floor: f64) -> Option<LogLogFit> {
    let kept: Vec<(u32, f64)> = points
        .iter()
        .copied()
        .filter(|&(_, e)| e > NOISE_FACTOR * noise_floor && e > 0.0)
        .collect();
    if kept.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = kept.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = kept.iter().map(|&(_, e)| e.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    Some(LogLogFit {
        slope,
        prefactor: (my - slope * mx).exp(),
        window: kept.iter().map(|&(n, _)| n).collect(),
    })
}

/// The bound checks on one curve.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    /// `error(N_min) N_min^{1/4}`
    pub k_hat: f64,
    /// `error(N) <= k_hat N^{-1/4}` at every N.
    pub envelope: bool,
    /// `error(N') <= (1 + slack) error(N)` for consecutive N < N'.
    pub monotone: bool,
    /// Fitted slope `<= -1/4`; `None` without a fit.
    pub slope: Option<bool>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.envelope && self.monotone && self.slope != Some(false)
    }
}

pub fn bound_report(points: &[(u32, f64)], fit: Option<&LogLogFit>) -> BoundReport {
    let (n0, e0) = points[0];
    let k_hat = e0 * (n0 as f64).powf(-RATE_EXPONENT);
    let envelope = points
        .iter()
        .all(|&(n, e)| e <= k_hat * (n as f64).powf(RATE_EXPONENT) * (1.0 + 1e-12));
    let monotone = points.windows(2).all(|w| w[1].1 <= (1.0 + MONOTONE_SLACK) * w[0].1);
    BoundReport { k_hat, envelope, monotone, slope: fit.map(|f| f.slope <= RATE_EXPONENT) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorCurve {
    /// `total`, `gap-aux` or `gap-aux-bf`.
    pub label: String,
    pub time: f64,
    pub dim: usize,
    pub cutoff: u32,
    pub tracer_cutoff: u32,
    pub potentials: [String; 2],
    pub initial: String,
    pub bf_cap: u32,
    pub tolerance: f64,
    pub h0_norm: f64,
    pub points: Vec<(u32, f64)>,
    pub fit: Option<LogLogFit>,
    pub bound: BoundReport,
}

impl ErrorCurve {
    pub fn new(label: &str, setup: &ConvergenceSetup, h0_norm: f64, points: Vec<(u32, f64)>) -> Result<Self> {
        check_n_list(&points.iter().map(|p| p.0).collect::<Vec<_>>())?;
        if let Some(&(n, e)) = points.iter().find(|p| !(p.1 >= 0.0)) {
            return Err(Error::InvalidInput(format!("error at N = {n} is {e}")));
        }
        let fit = loglog_fit(&points, setup.noise_floor());
        let bound = bound_report(&points, fit.as_ref());
        let m = &setup.model;
        Ok(Self {
            label: label.to_string(),
            time: setup.time,
            dim: m.modes.dim(),
            cutoff: m.modes.cutoff(),
            tracer_cutoff: m.params.tracer_cutoff,
            potentials: [m.v.descriptor(), m.w.descriptor()],
            initial: setup.initial.descriptor(),
            bf_cap: setup.bf_cap,
            tolerance: setup.propagation.tolerance,
            h0_norm,
            points,
            fit,
            bound,
        })
    }
}

/// The three curves of a sweep plus the consistency checks between them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub cells: Vec<ConvergenceCell>,
    pub total: ErrorCurve,
    pub gap_aux: ErrorCurve,
    pub gap_aux_bf: ErrorCurve,
    /// Largest `total - gap_aux - gap_aux_bf`.
    pub triangle_excess: f64,
    /// Largest `||Phi - Phi^{<=N}|| - ||N_+ Phi|| / (N + 1)`.
    pub tail_excess: f64,
}

impl ConvergenceReport {
    pub fn new(setup: &ConvergenceSetup, reference: &BfReference, cells: Vec<ConvergenceCell>) -> Result<Self> {
        let curve = |label: &str, f: fn(&ConvergenceCell) -> f64| {
            ErrorCurve::new(label, setup, reference.h0_norm, cells.iter().map(|c| (c.n, f(c))).collect())
        };
        let total = curve("total", |c| c.total)?;
        let gap_aux = curve("gap-aux", |c| c.gap_aux)?;
        let gap_aux_bf = curve("gap-aux-bf", |c| c.gap_aux_bf)?;
        let triangle_excess = cells.iter().map(ConvergenceCell::triangle_excess).fold(f64::NEG_INFINITY, f64::max);
        let tail_excess = cells
            .iter()
            .map(|c| c.tail - reference.excitation_norm / (c.n as f64 + 1.0))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { cells, total, gap_aux, gap_aux_bf, triangle_excess, tail_excess })
    }

    pub fn triangle_holds(&self) -> bool {
        self.triangle_excess <= 1e-12
    }

    pub fn passed(&self) -> bool {
        self.total.bound.passed()
            && self.gap_aux.bound.passed()
            && self.gap_aux_bf.bound.passed()
            && self.triangle_holds()
            && self.tail_excess <= 1e-14
    }
}

/// Sweep over `n_list`; any failing cell fails the whole call.
pub fn error_curves(setup: &ConvergenceSetup, n_list: &[u32]) -> Result<ConvergenceReport> {
    let (reference, cells) = convergence_cells(setup, n_list)?;
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;
    ConvergenceReport::new(setup, &reference, cells)
}

/// `(||Phi - Phi^{<=N}||, ||N_+ Phi|| / (N + 1))` for a state on an
/// excitation basis.
pub fn truncation_tail(joint: &JointBasis<ExcitationBasis>, phi: &StateVector, n: u32) -> Result<(f64, f64)> {
    phi.ensure_same_basis(&joint.tag())?;
    let number = joint.number_diagonal();
    let mut tail = 0.0;
    let mut moment = 0.0;
    for (a, &k) in phi.amplitudes().iter().zip(&number) {
        let w = a.norm_sqr();
        if k > n as f64 {
            tail += w;
        }
        moment += w * k * k;
    }
    Ok((tail.sqrt(), moment.sqrt() / (n as f64 + 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{preset_potential, ModeSet, ModelParams, Momentum, PotentialKind};
    use crate::C64;

    fn setup(v: &str, w: &str, time: f64) -> ConvergenceSetup {
        let modes = ModeSet::new(1, 1).unwrap();
        let model = Model::new(
            modes.clone(),
            preset_potential(v, PotentialKind::Pair, &modes, 1.0).unwrap(),
            preset_potential(w, PotentialKind::Tracer, &modes, 1.0).unwrap(),
            ModelParams::new(4, 1.0, 2).unwrap(),
        )
        .unwrap();
        ConvergenceSetup {
            model,
            initial: InitialKind::Single { p: Momentum::unit(0), q: Momentum::ZERO },
            time,
            bf_cap: 4,
            propagation: PropagationConfig::new(time),
        }
    }

    #[test]
    fn zero_time_and_free_model_give_zero_errors() {
        for s in [setup("soft", "soft", 0.0), setup("zero", "zero", 1.0)] {
            let r = error_curves(&s, &[2, 3, 4]).unwrap();
            for c in &r.cells {
                assert!(c.total < 1e-12 && c.gap_aux < 1e-12 && c.gap_aux_bf < 1e-12, "{c:?}");
            }
        }
    }

    #[test]
    fn triangle_and_tail_hold() {
        let r = error_curves(&setup("soft", "soft", 0.5), &[2, 3, 4]).unwrap();
        assert!(r.triangle_holds());
        assert!(r.tail_excess <= 0.0);
        assert!(r.cells.iter().all(|c| c.total > 0.0));
    }

    #[test]
    fn fit_recovers_a_power_law() {
        let pts: Vec<(u32, f64)> = [4u32, 8, 16, 32].iter().map(|&n| (n, 3.0 * (n as f64).powf(-0.5))).collect();
        let fit = loglog_fit(&pts, 0.0).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-12);
        let noisy = loglog_fit(&pts, pts[3].1 / 10.0).unwrap();
        assert_eq!(noisy.window, vec![4, 8, 16]);
        let r = bound_report(&pts, Some(&fit));
        assert!(r.passed());
        let rising = [(4, 1.0), (8, 1.2)];
        assert!(!bound_report(&rising, None).monotone);
    }

    #[test]
    fn tail_of_a_known_state() {
        let modes = ModeSet::new(1, 1).unwrap();
        let joint = JointBasis::new(ModeSet::new(1, 0).unwrap(), ExcitationBasis::new(&modes, 3).unwrap());
        let mut amps = vec![C64::default(); joint.dim()];
        // equal weight on N_+ = 0 and N_+ = 3
        amps[0] = C64::new(0.5f64.sqrt(), 0.0);
        amps[joint.dim() - 1] = C64::new(0.5f64.sqrt(), 0.0);
        let phi = StateVector::new(joint.tag(), amps).unwrap();
        let (tail, bound) = truncation_tail(&joint, &phi, 2).unwrap();
        assert!((tail - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((bound - (4.5f64).sqrt() / 3.0).abs() < 1e-15);
        assert!(tail <= bound);
    }
}
