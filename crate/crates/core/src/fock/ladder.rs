//! Single creation/annihilation operators acting on state vectors, and
//! occupation-preserving maps between bases over the same modes.

use num_complex::Complex64 as C64;

use super::basis::OccupationBasis;
use super::joint::JointBasis;
use super::state::StateVector;
use crate::error::{Error, Result};

fn compatible<S: OccupationBasis, T: OccupationBasis>(from: &S, to: &T) -> Result<()> {
    if from.mode_set() != to.mode_set() || from.mode_count() != to.mode_count() {
        return Err(Error::BasisMismatch {
            expected: from.descriptor(),
            found: to.descriptor(),
        });
    }
    Ok(())
}

fn local(basis: &impl OccupationBasis, mode: usize) -> Result<usize> {
    basis
        .local_mode(mode)
        .ok_or(Error::OutOfRange { index: mode, len: basis.mode_set().len() })
}

fn ladder<S, T>(from: &S, to: &T, state: &StateVector, mode: usize, raise: bool) -> Result<StateVector>
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    compatible(from, to)?;
    state.ensure_same_basis(&from.tag())?;
    let l = local(from, mode)?;
    let mut out = StateVector::zeros(to.tag());
    let mut occ = vec![0; from.mode_count()];
    for (i, &a) in state.amplitudes().iter().enumerate() {
        if a == C64::default() {
            continue;
        }
        from.unrank_into(i, &mut occ);
        let coef = if raise {
            occ[l] += 1;
            (occ[l] as f64).sqrt()
        } else {
            if occ[l] == 0 {
                continue;
            }
            let c = (occ[l] as f64).sqrt();
            occ[l] -= 1;
            c
        };
        match to.rank(&occ) {
            Some(j) => out.amplitudes_mut()[j] += a * coef,
            None => {
                return Err(Error::OutOfBasis(format!(
                    "{:?} is not an element of {}",
                    occ,
                    to.descriptor()
                )))
            }
        }
    }
    Ok(out)
}

/// `a_k` with `k` a mode-set index. The result is expressed in `to`, which is
/// `from` itself for excitation bases and the `N - 1` sector for sectors.
pub fn annihilate<S, T>(from: &S, to: &T, state: &StateVector, mode: usize) -> Result<StateVector>
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    ladder(from, to, state, mode, false)
}

/// `a_k^*`. A nonzero component whose image is not an element of `to` is an
/// error; nothing is truncated silently.
pub fn create<S, T>(from: &S, to: &T, state: &StateVector, mode: usize) -> Result<StateVector>
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    ladder(from, to, state, mode, true)
}

/// `N_+ state`.
pub fn apply_number<B: OccupationBasis>(basis: &B, state: &StateVector) -> Result<StateVector> {
    state.ensure_same_basis(&basis.tag())?;
    let diag = basis.number_diagonal();
    let amps = state.amplitudes().iter().zip(&diag).map(|(a, n)| a * n).collect();
    StateVector::new(basis.tag(), amps)
}

/// For each element of `from`, its index in `to` (same occupation), if any.
pub fn occupation_map<S, T>(from: &S, to: &T) -> Result<Vec<Option<usize>>>
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    compatible(from, to)?;
    let mut occ = vec![0; from.mode_count()];
    Ok((0..from.dim())
        .map(|i| {
            from.unrank_into(i, &mut occ);
            to.rank(&occ)
        })
        .collect())
}

/// Moves a joint state between boson bases over the same modes (for example
/// excitation caps `M` and `M'`). Components without a counterpart are
/// dropped; the returned `f64` is their total weight `sum |amp|^2`.
pub fn transfer<S, T>(
    from: &JointBasis<S>,
    to: &JointBasis<T>,
    state: &StateVector,
) -> Result<(StateVector, f64)>
where
    S: OccupationBasis,
    T: OccupationBasis,
{
    if from.tracer() != to.tracer() {
        return Err(Error::BasisMismatch {
            expected: from.descriptor(),
            found: to.descriptor(),
        });
    }
    state.ensure_same_basis(&from.tag())?;
    let map = occupation_map(from.boson(), to.boson())?;
    let mut out = StateVector::zeros(to.tag());
    let mut dropped = 0.0;
    for t in 0..from.tracer().len() {
        for (b, target) in map.iter().enumerate() {
            let a = state.amplitudes()[from.join(t, b)];
            match target {
                Some(tb) => out.amplitudes_mut()[to.join(t, *tb)] = a,
                None => dropped += a.norm_sqr(),
            }
        }
    }
    Ok((out, dropped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{ExcitationBasis, SectorBasis};
    use crate::lattice::{ModeSet, Momentum};

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn annihilate_single_mode() {
        let m = ModeSet::new(1, 0).unwrap();
        let three = SectorBasis::new(&m, 3).unwrap();
        let two = SectorBasis::new(&m, 2).unwrap();
        let s = StateVector::basis_state(three.tag(), 0).unwrap();
        let out = annihilate(&three, &two, &s, 0).unwrap();
        assert!((out.amplitudes()[0] - c(3f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn annihilate_vacuum_is_zero() {
        let m = ModeSet::new(1, 1).unwrap();
        let exc = ExcitationBasis::new(&m, 2).unwrap();
        let vac = StateVector::basis_state(exc.tag(), 0).unwrap();
        for k in m.nonzero_indices() {
            assert_eq!(annihilate(&exc, &exc, &vac, k).unwrap().norm(), 0.0);
        }
        // the condensate is not an excitation mode
        assert!(annihilate(&exc, &exc, &vac, m.zero_index()).is_err());
    }

    #[test]
    fn create_on_vacuum_and_number() {
        let m = ModeSet::new(1, 1).unwrap();
        let exc = ExcitationBasis::new(&m, 3).unwrap();
        let k = m.index_of(Momentum::new(&[1])).unwrap();
        let vac = StateVector::basis_state(exc.tag(), 0).unwrap();
        let one = create(&exc, &exc, &vac, k).unwrap();
        assert_eq!(one.amplitudes()[exc.single(k).unwrap()], c(1.0));
        let two = create(&exc, &exc, &one, k).unwrap();
        let back = annihilate(&exc, &exc, &two, k).unwrap();
        // a^* a on |2> gives 2 |2>, so a a^* on |1> gives 2 |1>
        let mut expected = one.clone();
        expected.scale(c(2.0));
        assert!(back.distance(&expected).unwrap() < 1e-14);
    }

    #[test]
    fn create_past_the_cap_is_an_error() {
        let m = ModeSet::new(1, 1).unwrap();
        let exc = ExcitationBasis::new(&m, 1).unwrap();
        let k = m.index_of(Momentum::new(&[1])).unwrap();
        let one = StateVector::basis_state(exc.tag(), exc.single(k).unwrap()).unwrap();
        assert!(matches!(create(&exc, &exc, &one, k), Err(Error::OutOfBasis(_))));
    }

    #[test]
    fn transfer_between_caps() {
        let m = ModeSet::new(1, 1).unwrap();
        let t = ModeSet::new(1, 1).unwrap();
        let small = JointBasis::new(t.clone(), ExcitationBasis::new(&m, 1).unwrap());
        let big = JointBasis::new(t, ExcitationBasis::new(&m, 3).unwrap());
        let amps = (0..big.dim()).map(|i| c(i as f64)).collect();
        let s = StateVector::new(big.tag(), amps).unwrap();
        let (down, dropped) = transfer(&big, &small, &s).unwrap();
        let (up, none) = transfer(&small, &big, &down).unwrap();
        assert_eq!(none, 0.0);
        assert!((down.norm_sqr() + dropped - s.norm_sqr()).abs() < 1e-9);
        assert!((up.norm_sqr() - down.norm_sqr()).abs() < 1e-12);
    }
}
