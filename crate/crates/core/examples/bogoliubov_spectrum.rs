//! Lowest excitation per momentum of the Bogoliubov Hamiltonian as the
//! excitation cap grows, against sqrt(eps^2 + 4 eps V).

use bfdyn::diagnostics::bogoliubov_spectrum_check;
use bfdyn::lattice::{preset_potential, ModeSet, PotentialKind};

fn main() -> bfdyn::Result<()> {
    let modes = ModeSet::new(1, 2)?;
    for name in ["zero", "soft", "gauss"] {
        let v = preset_potential(name, PotentialKind::Pair, &modes, 1.0)?;
        let r = bogoliubov_spectrum_check(&modes, &v, &[2, 4, 6, 8])?;
        println!("{name}: passed {} max deviation {:.2e}", r.passed(), r.max_deviation);
        for row in &r.rows {
            let values: Vec<String> = row.values.iter().map(|(m, g)| format!("M={m}:{g:.9}")).collect();
            println!("  P = {:<10} oracle {:>13.9}  {}", row.momentum, row.oracle, values.join(" "));
        }
        if let (Some(e0), Some(top)) = (r.ground_energy_oracle, r.caps.last()) {
            println!("  E0 oracle {e0:.9}, M = {} {:.9}", top.cap, top.ground_energy);
        }
    }
    Ok(())
}
