//! Excitation spectrum of the Bogoliubov Hamiltonian against the closed-form
//! dispersion of the `(p, -p)` pair reduction.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{ExcitationBasis, OccupationBasis};
use crate::lattice::{kinetic_energy, ModeSet, Momentum, PotentialKind, PotentialSpec};
use crate::operators::{assemble_bog, block_decompose_by};
use crate::propagator::dense_eigen;

pub const SPECTRUM_TOL: f64 = 1e-6;

/// `E(p) = sqrt(eps^2 + 4 eps V(p))`, or `None` when `eps + 4 V(p) < 0`.
pub fn dispersion(p: Momentum, v: &PotentialSpec) -> Option<f64> {
    let eps = kinetic_energy(p);
    let vp = v.coeff(p).re;
    if eps + 4.0 * vp < 0.0 {
        None
    } else {
        Some((eps * eps + 4.0 * eps * vp).sqrt())
    }
}

/// `E_0 = 1/2 sum_{p != 0} (E(p) - eps(p) - 2 V(p))`.
pub fn ground_energy(modes: &ModeSet, v: &PotentialSpec) -> Option<f64> {
    let mut sum = 0.0;
    for &p in modes.modes().iter().filter(|p| !p.is_zero()) {
        sum += dispersion(p, v)? - kinetic_energy(p) - 2.0 * v.coeff(p).re;
    }
    Some(0.5 * sum)
}

/// Lowest free quasi-particle energy, over one to `cap` quasi-particles,
/// for every total momentum in the mode set.
pub fn oracle_gaps(modes: &ModeSet, v: &PotentialSpec, cap: u32) -> Result<Option<BTreeMap<Momentum, f64>>> {
    let basis = ExcitationBasis::new(modes, cap)?;
    let energies: Option<Vec<f64>> = (0..basis.mode_count()).map(|l| dispersion(basis.mode_momentum(l), v)).collect();
    let Some(energies) = energies else { return Ok(None) };
    let mut out: BTreeMap<Momentum, f64> = BTreeMap::new();
    let mut occ = vec![0; basis.mode_count()];
    for i in basis.level_range(1).start..basis.dim() {
        basis.unrank_into(i, &mut occ);
        let e: f64 = occ.iter().zip(&energies).map(|(&n, e)| n as f64 * e).sum();
        let p = basis.momentum_of(&occ);
        if modes.index_of(p).is_none() {
            continue;
        }
        let slot = out.entry(p).or_insert(f64::INFINITY);
        *slot = slot.min(e);
    }
    Ok(Some(out))
}

/// Spectrum data at one excitation cap.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapSpectrum {
    pub cap: u32,
    pub dim: usize,
    pub ground_energy: f64,
    /// Lowest energy above the ground state per total momentum in the mode
    /// set.
    pub gaps: Vec<(Momentum, f64)>,
}

impl CapSpectrum {
    pub fn gap(&self, p: Momentum) -> Option<f64> {
        self.gaps.iter().find(|(q, _)| *q == p).map(|&(_, g)| g)
    }
}

/// One total momentum across the caps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub momentum: Momentum,
    pub oracle: f64,
    /// Gap at every cap where the block exists.
    pub values: Vec<(u32, f64)>,
    pub deviation: f64,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub modes: String,
    pub potential: String,
    pub unstable: bool,
    pub caps: Vec<CapSpectrum>,
    pub rows: Vec<GapRow>,
    pub ground_energy_oracle: Option<f64>,
    pub ground_energy_deviation: Option<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        !self.unstable
            && self.max_deviation <= self.tolerance
            && self.rows.iter().all(|r| r.monotone)
            && self.caps.iter().all(|c| c.ground_energy <= 1e-12)
    }
}

fn cap_spectrum(modes: &ModeSet, v: &PotentialSpec, cap: u32) -> Result<CapSpectrum> {
    let (basis, h) = assemble_bog(modes, v, cap)?;
    let dec = block_decompose_by(&h, &basis.momentum_diagonal())?;
    let mut lows = Vec::with_capacity(dec.len());
    for b in dec.blocks() {
        if modes.index_of(b.momentum).is_none() {
            continue;
        }
        let m = b.operator.matrix();
        let values = if m.triplets().all(|(r, c, _)| r == c) {
            let mut d: Vec<f64> = (0..m.nrows()).map(|i| m.get(i, i).re).collect();
            d.sort_by(f64::total_cmp);
            d
        } else {
            dense_eigen(m)?.values
        };
        lows.push((b.momentum, values));
    }
    let ground = lows
        .iter()
        .find(|(p, _)| p.is_zero())
        .map(|(_, vals)| vals[0])
        .expect("the vacuum block exists");
    let mut gaps = Vec::new();
    for (p, vals) in lows {
        let level = if p.is_zero() { vals.get(1) } else { vals.first() };
        if let Some(e) = level {
            gaps.push((p, e - ground));
        }
    }
    Ok(CapSpectrum { cap, dim: basis.dim(), ground_energy: ground, gaps })
}

/// Block-wise dense spectra of `H^Bog` at every cap, compared with the
/// dispersion oracle. Gaps are compared at the largest cap.
pub fn bogoliubov_spectrum_check(modes: &ModeSet, v: &PotentialSpec, caps: &[u32]) -> Result<SpectrumReport> {
    if v.kind() != PotentialKind::Pair {
        return Err(Error::Potential("the spectrum check needs a pair potential".into()));
    }
    if caps.is_empty() || caps.windows(2).any(|w| w[0] >= w[1]) || caps[0] == 0 {
        return Err(Error::InvalidInput(format!("caps must be positive and strictly increasing, got {caps:?}")));
    }
    let last = *caps.last().expect("nonempty");
    let mut report = SpectrumReport {
        modes: modes.descriptor(),
        potential: v.descriptor(),
        unstable: true,
        caps: Vec::new(),
        rows: Vec::new(),
        ground_energy_oracle: None,
        ground_energy_deviation: None,
        max_deviation: f64::INFINITY,
        tolerance: SPECTRUM_TOL,
    };
    let Some(oracle) = oracle_gaps(modes, v, last)? else {
        return Ok(report);
    };
    report.unstable = false;
    report.caps = caps.iter().map(|&c| cap_spectrum(modes, v, c)).collect::<Result<_>>()?;
    let top = report.caps.last().expect("nonempty");
    let e0 = ground_energy(modes, v).expect("stable");
    report.ground_energy_oracle = Some(e0);
    report.ground_energy_deviation = Some((top.ground_energy - e0).abs());

    let mut max_dev: f64 = 0.0;
    for (&p, &o) in &oracle {
        let values: Vec<(u32, f64)> =
            report.caps.iter().filter_map(|c| c.gap(p).map(|g| (c.cap, g))).collect();
        let Some(&(_, converged)) = values.last() else { continue };
        let deviation = (converged - o).abs();
        max_dev = max_dev.max(deviation);
        // successive caps approach the converged gap without moving away
        let dist: Vec<f64> = values.iter().map(|&(_, g)| (g - converged).abs()).collect();
        let monotone = dist.windows(2).all(|w| w[1] <= w[0] + SPECTRUM_TOL);
        report.rows.push(GapRow { momentum: p, oracle: o, values, deviation, monotone });
    }
    report.max_deviation = max_dev;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::preset_potential;

    #[test]
    fn free_field_is_exact() {
        let modes = ModeSet::new(1, 2).unwrap();
        let v = preset_potential("zero", PotentialKind::Pair, &modes, 1.0).unwrap();
        let r = bogoliubov_spectrum_check(&modes, &v, &[2, 3]).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_deviation, 0.0);
        assert_eq!(r.caps[1].ground_energy, 0.0);
        let e1 = kinetic_energy(Momentum::unit(0));
        assert_eq!(r.caps[1].gap(Momentum::unit(0)).unwrap(), e1);
    }

    #[test]
    fn strong_attraction_is_unstable() {
        let modes = ModeSet::new(1, 1).unwrap();
        let v = preset_potential("soft", PotentialKind::Pair, &modes, -40.0).unwrap();
        let r = bogoliubov_spectrum_check(&modes, &v, &[2]).unwrap();
        assert!(r.unstable && !r.passed());
    }

    #[test]
    fn single_pair_converges_to_the_dispersion() {
        let modes = ModeSet::new(1, 1).unwrap();
        let v = preset_potential("soft", PotentialKind::Pair, &modes, 1.0).unwrap();
        let r = bogoliubov_spectrum_check(&modes, &v, &[4, 8, 16, 24]).unwrap();
        assert!(r.passed(), "{:?}", r.rows);
        assert!(r.caps.last().unwrap().ground_energy < 0.0);
        assert!(serde_json::to_string(&r).is_ok());
    }
}
