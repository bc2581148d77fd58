//! The operator identity suite on the soft presets, and its response to a
//! potential that breaks evenness.

use bfdyn::diagnostics::identities::corrupted_pair_potential;
use bfdyn::diagnostics::{inventory, run_identity_suite, SuiteConfig};
use bfdyn::lattice::{preset_potential, ModeSet, PotentialKind};

fn main() -> bfdyn::Result<()> {
    let modes = ModeSet::new(1, 1)?;
    let mut cfg = SuiteConfig {
        modes: modes.clone(),
        tracer_cutoff: 2,
        n_list: (2..=6).collect(),
        v: preset_potential("soft", PotentialKind::Pair, &modes, 1.0)?,
        w: preset_potential("soft", PotentialKind::Tracer, &modes, 1.0)?,
        samples: 100,
        seed: 1,
    };
    let report = run_identity_suite(&cfg)?;
    for (name, statement) in inventory() {
        println!("{name:<22} {:>9.2e}  {statement}", report.max_deviation(name));
    }
    println!("all passed: {}", report.all_passed());

    cfg.n_list = vec![3];
    cfg.v = corrupted_pair_potential(&modes)?;
    let broken = run_identity_suite(&cfg)?;
    println!("\nwith V(1) != V(-1):");
    for c in broken.failures() {
        println!("  {:<22} {:<12} {:.2e}", c.name, c.setting, c.deviation);
    }
    Ok(())
}
