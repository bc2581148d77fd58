//! Plane-wave modes, kinetic energies and the preset potentials.

use bfdyn::lattice::{format_potential_table, kinetic_energy, preset_potential, ModeSet, PotentialKind, PRESETS};

fn main() -> bfdyn::Result<()> {
    let modes = ModeSet::new(2, 1)?;
    println!("{} modes, condensate at index {}", modes.len(), modes.zero_index());
    for (i, k) in modes.modes().iter().enumerate() {
        println!("{i:>2} {k:<10} eps = {:8.3}", kinetic_energy(*k));
    }

    let line = ModeSet::new(1, 1)?;
    for name in PRESETS {
        let v = preset_potential(name, PotentialKind::Pair, &line, 1.0)?;
        println!("\n{name}: |V|^2 = {:.4}", v.l2_norm_sq());
        print!("{}", format_potential_table(&v));
    }
    Ok(())
}
