//! Randomized invariants of the bases, ladder operators and propagator.

use bfdyn::fock::ladder::{annihilate, create, transfer};
use bfdyn::fock::{ExcitationBasis, JointBasis, OccupationBasis, SectorBasis, StateVector};
use bfdyn::lattice::{preset_potential, ModeSet, ModelParams, PotentialKind};
use bfdyn::operators::{assemble_bf, Model};
use bfdyn::propagator::{dense_deviation, evolve, random_hermitian, random_state, PropagationConfig};
use bfdyn::C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ranking_round_trips(cutoff in 1u32..3, n in 0u32..6, pick in any::<u64>()) {
        let modes = ModeSet::new(1, cutoff).unwrap();
        let sector = SectorBasis::new(&modes, n).unwrap();
        let i = (pick % sector.dim() as u64) as usize;
        let occ = sector.occupation(i);
        prop_assert_eq!(occ.iter().sum::<u32>(), n);
        prop_assert_eq!(sector.rank(&occ), Some(i));

        let exc = ExcitationBasis::new(&modes, n).unwrap();
        let j = (pick % exc.dim() as u64) as usize;
        let occ = exc.occupation(j);
        prop_assert!(exc.excitations(&occ) <= n);
        prop_assert_eq!(exc.rank(&occ), Some(j));
    }

    #[test]
    fn canonical_commutator_on_states(seed in any::<u64>(), mode in 0usize..2) {
        // [a, a^*] = 1 on states with headroom below the cap
        let modes = ModeSet::new(1, 1).unwrap();
        let big = ExcitationBasis::new(&modes, 4).unwrap();
        let mut up = random_state(big.tag(), seed);
        for a in &mut up.amplitudes_mut()[big.level_range(4)] {
            *a = C64::default();
        }
        let mode = modes.nonzero_indices()[mode];
        let ca = create(&big, &big, &annihilate(&big, &big, &up, mode).unwrap(), mode).unwrap();
        let ac = annihilate(&big, &big, &create(&big, &big, &up, mode).unwrap(), mode).unwrap();
        let mut diff = ac.clone();
        diff.axpy(C64::new(-1.0, 0.0), &ca).unwrap();
        prop_assert!(diff.distance(&up).unwrap() < 1e-12);
    }

    #[test]
    fn krylov_matches_dense(dim in 8usize..200, per_row in 2usize..12, seed in any::<u64>(), t in -3.0f64..3.0) {
        let h = random_hermitian(dim, per_row, seed).unwrap();
        let psi = random_state(h.tag().clone(), seed.wrapping_add(1));
        prop_assert!(dense_deviation(&h, &psi, &PropagationConfig::new(t)).unwrap() < 1e-8);
    }

    #[test]
    fn evolution_is_reversible(seed in any::<u64>(), t in 0.1f64..2.0) {
        let modes = ModeSet::new(1, 1).unwrap();
        let model = Model::new(
            modes.clone(),
            preset_potential("soft", PotentialKind::Pair, &modes, 1.0).unwrap(),
            preset_potential("gauss", PotentialKind::Tracer, &modes, 1.0).unwrap(),
            ModelParams::new(4, 1.0, 1).unwrap(),
        ).unwrap();
        let (joint, h) = assemble_bf(&model, 4).unwrap();
        let psi = random_state(joint.tag(), seed);
        let fwd = evolve(&h, &psi, &PropagationConfig::new(t)).unwrap();
        let back = evolve(&h, &fwd, &PropagationConfig::new(-t)).unwrap();
        prop_assert!(back.distance(&psi).unwrap() < 1e-8);
        prop_assert!((fwd.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn transfer_reports_dropped_weight() {
    let modes = ModeSet::new(1, 1).unwrap();
    let tracer = ModeSet::new(1, 1).unwrap();
    let big = JointBasis::new(tracer.clone(), ExcitationBasis::new(&modes, 4).unwrap());
    let small = JointBasis::new(tracer, ExcitationBasis::new(&modes, 2).unwrap());
    let psi = random_state(big.tag(), 5);
    let (down, dropped) = transfer(&big, &small, &psi).unwrap();
    assert!((down.norm_sqr() + dropped - 1.0).abs() < 1e-14);
    let (up, none) = transfer(&small, &big, &down).unwrap();
    assert_eq!(none, 0.0);
    assert!((up.norm() - down.norm()).abs() < 1e-15);
    let _: &StateVector = &up;
}
