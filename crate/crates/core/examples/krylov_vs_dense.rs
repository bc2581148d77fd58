//! The Krylov propagator against full diagonalization, and the blocked
//! evolution of a physical Hamiltonian.

use bfdyn::diagnostics::{Flavor, FlavorRun, InitialKind};
use bfdyn::lattice::{preset_potential, ModeSet, ModelParams, PotentialKind};
use bfdyn::operators::{block_decompose, Model};
use bfdyn::propagator::{dense_deviation, evolve, evolve_blocked, random_hermitian, random_state, PropagationConfig};

fn main() -> bfdyn::Result<()> {
    println!("{:>5} {:>6} {:>10}", "dim", "t", "deviation");
    for (i, dim) in [16, 64, 256, 1024].into_iter().enumerate() {
        let h = random_hermitian(dim, 10, i as u64)?;
        let psi = random_state(h.tag().clone(), 100 + i as u64);
        let t = 0.5 + i as f64;
        println!("{dim:>5} {t:>6.2} {:>10.2e}", dense_deviation(&h, &psi, &PropagationConfig::new(t))?);
    }

    let modes = ModeSet::new(1, 1)?;
    let model = Model::new(
        modes.clone(),
        preset_potential("soft", PotentialKind::Pair, &modes, 1.0)?,
        preset_potential("soft", PotentialKind::Tracer, &modes, 1.0)?,
        ModelParams::new(8, 1.0, 2)?,
    )?;
    let init = InitialKind::VacuumGaussian { width: 1.0 };
    let run = FlavorRun::prepare(Flavor::Bf, &model, &init, 8)?;
    let cfg = PropagationConfig::new(1.0);
    let whole = evolve(&run.hamiltonian, &run.psi0, &cfg)?;
    let dec = block_decompose(&run.hamiltonian, run.excitation_basis())?;
    let blocked = evolve_blocked(&dec, &run.psi0, &cfg)?;
    println!(
        "\nH^BF (dim {}, {} blocks): whole vs blocked {:.2e}",
        run.dim(),
        dec.len(),
        whole.distance(&blocked)?
    );
    Ok(())
}
