//! Initial states on the excitation space.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{ExcitationBasis, JointBasis, OccupationBasis, StateVector};
use crate::lattice::{kinetic_energy, ModelParams, Momentum};

/// The library of initial states. Every choice has finitely many
/// excitations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialKind {
    /// Excitation vacuum tensored with tracer amplitudes
    /// `exp(-|q|^2 / (2 width^2))`.
    VacuumGaussian { width: f64 },
    /// One excitation at `p`, tracer plane wave `q`.
    Single { p: Momentum, q: Momentum },
    /// Excitations at `p` and `-p`, tracer plane wave `q`.
    Pair { p: Momentum, q: Momentum },
}

impl InitialKind {
    pub fn descriptor(&self) -> String {
        match self {
            InitialKind::VacuumGaussian { width } => format!("vacuum-gaussian(width={width})"),
            InitialKind::Single { p, q } => format!("single(p={p},q={q})"),
            InitialKind::Pair { p, q } => format!("pair(p={p},q={q})"),
        }
    }

    /// Largest excitation number in the support.
    pub fn excitations(&self) -> u32 {
        match self {
            InitialKind::VacuumGaussian { .. } => 0,
            InitialKind::Single { .. } => 1,
            InitialKind::Pair { .. } => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct InitialState {
    pub state: StateVector,
    pub descriptor: String,
    /// `||H_0 Phi||` with `H_0 = -Delta_x / 2m + dGamma(-Delta)`.
    pub h0_norm: f64,
    /// `||(N_+ + 1) Phi||`.
    pub number_norm: f64,
    /// `||N_+ Phi||`.
    pub excitation_norm: f64,
}

/// Builds the normalized state `kind` on `joint`.
pub fn make_initial_state(
    kind: &InitialKind,
    joint: &JointBasis<ExcitationBasis>,
    params: &ModelParams,
) -> Result<InitialState> {
    let boson = joint.boson();
    let tracer = joint.tracer();
    if kind.excitations() > boson.cap() {
        return Err(Error::OutOfBasis(format!(
            "{} needs {} excitations, cap is {}",
            kind.descriptor(),
            kind.excitations(),
            boson.cap()
        )));
    }
    let mut amps = vec![C64::default(); joint.dim()];
    let excited = |p: Momentum| -> Result<usize> {
        let g = boson
            .mode_set()
            .index_of(p)
            .filter(|_| !p.is_zero())
            .ok_or_else(|| Error::OutOfBasis(format!("{p} is not an excited mode")))?;
        Ok(boson.local_mode(g).expect("nonzero modes are carried"))
    };
    let plane = |q: Momentum| {
        tracer
            .index_of(q)
            .ok_or_else(|| Error::OutOfBasis(format!("tracer momentum {q} exceeds the cutoff")))
    };
    match kind {
        InitialKind::VacuumGaussian { width } => {
            if !(*width > 0.0) {
                return Err(Error::InvalidInput(format!("width must be positive, got {width}")));
            }
            for (t, q) in tracer.modes().iter().enumerate() {
                let a = (-(q.norm_sq() as f64) / (2.0 * width * width)).exp();
                amps[joint.join(t, 0)] = C64::new(a, 0.0);
            }
        }
        InitialKind::Single { p, q } => {
            let mut occ = vec![0; boson.mode_count()];
            occ[excited(*p)?] += 1;
            let b = boson.rank(&occ).expect("within cap");
            amps[joint.join(plane(*q)?, b)] = C64::new(1.0, 0.0);
        }
        InitialKind::Pair { p, q } => {
            let mut occ = vec![0; boson.mode_count()];
            occ[excited(*p)?] += 1;
            occ[excited(-*p)?] += 1;
            let b = boson.rank(&occ).expect("within cap");
            amps[joint.join(plane(*q)?, b)] = C64::new(1.0, 0.0);
        }
    }
    let mut state = StateVector::new(joint.tag(), amps)?;
    state.normalize()?;

    let number = joint.number_diagonal();
    let h0 = free_diagonal(joint, params);
    let weighted = |w: &dyn Fn(usize) -> f64| -> f64 {
        state
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * w(i).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    Ok(InitialState {
        descriptor: kind.descriptor(),
        h0_norm: weighted(&|i| h0[i]),
        number_norm: weighted(&|i| number[i] + 1.0),
        excitation_norm: weighted(&|i| number[i]),
        state,
    })
}

/// Diagonal of `H_0 = -Delta_x / 2m + dGamma(-Delta)` on a joint basis.
pub fn free_diagonal<B: OccupationBasis>(joint: &JointBasis<B>, params: &ModelParams) -> Vec<f64> {
    let boson = joint.boson();
    let boson_energy: Vec<f64> = (0..boson.dim())
        .map(|b| {
            boson
                .occupation(b)
                .iter()
                .enumerate()
                .map(|(l, &n)| n as f64 * kinetic_energy(boson.mode_momentum(l)))
                .sum()
        })
        .collect();
    let mut out = Vec::with_capacity(joint.dim());
    for q in joint.tracer().modes() {
        let e = params.tracer_kinetic(*q);
        out.extend(boson_energy.iter().map(|b| b + e));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ModeSet;

    fn joint(cap: u32) -> JointBasis<ExcitationBasis> {
        let m = ModeSet::new(1, 1).unwrap();
        JointBasis::new(ModeSet::new(1, 2).unwrap(), ExcitationBasis::new(&m, cap).unwrap())
    }

    fn params() -> ModelParams {
        ModelParams::new(4, 1.0, 2).unwrap()
    }

    #[test]
    fn library_states() {
        let j = joint(3);
        let vac = make_initial_state(&InitialKind::VacuumGaussian { width: 1.0 }, &j, &params()).unwrap();
        assert!((vac.state.norm() - 1.0).abs() < 1e-14);
        assert_eq!(vac.excitation_norm, 0.0);

        let e = Momentum::unit(0);
        let single = make_initial_state(&InitialKind::Single { p: e, q: Momentum::ZERO }, &j, &params()).unwrap();
        assert!((single.number_norm.powi(2) - 4.0).abs() < 1e-14);
        let eps = kinetic_energy(e);
        assert!((single.h0_norm - eps).abs() < 1e-12);

        let pair = make_initial_state(&InitialKind::Pair { p: e, q: e }, &j, &params()).unwrap();
        assert!((pair.excitation_norm - 2.0).abs() < 1e-14);
    }

    #[test]
    fn support_errors() {
        let e = Momentum::unit(0);
        let kind = InitialKind::Pair { p: e, q: Momentum::ZERO };
        assert!(make_initial_state(&kind, &joint(1), &params()).is_err());
        let far = InitialKind::Single { p: e, q: e * 5 };
        assert!(make_initial_state(&far, &joint(2), &params()).is_err());
        let zero = InitialKind::Single { p: Momentum::ZERO, q: Momentum::ZERO };
        assert!(make_initial_state(&zero, &joint(2), &params()).is_err());
    }
}
