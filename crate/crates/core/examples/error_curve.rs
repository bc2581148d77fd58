//! Error curves against N for the default scenario: a single excitation at
//! p = 1 with the tracer at rest, soft pair and tracer potentials, t = 1.

use bfdyn::diagnostics::{bf_doubling_deviation, error_curves, ConvergenceSetup, InitialKind};
use bfdyn::lattice::{preset_potential, ModeSet, ModelParams, Momentum, PotentialKind};
use bfdyn::operators::Model;
use bfdyn::propagator::PropagationConfig;

fn main() -> bfdyn::Result<()> {
    let n_list: Vec<u32> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("N values are integers"))
        .collect();
    let n_list = if n_list.is_empty() { vec![4, 8, 16, 32, 64] } else { n_list };

    let modes = ModeSet::new(1, 1)?;
    let model = Model::new(
        modes.clone(),
        preset_potential("soft", PotentialKind::Pair, &modes, 1.0)?,
        preset_potential("soft", PotentialKind::Tracer, &modes, 1.0)?,
        ModelParams::new(n_list[0], 1.0, 2)?,
    )?;
    let setup = ConvergenceSetup {
        model,
        initial: InitialKind::Single { p: Momentum::unit(0), q: Momentum::ZERO },
        time: 1.0,
        bf_cap: 8,
        propagation: PropagationConfig::new(1.0),
    };

    println!("BF cap doubling deviation: {:.3e}", bf_doubling_deviation(&setup)?);
    let report = error_curves(&setup, &n_list)?;
    println!("{:>4} {:>12} {:>12} {:>12}", "N", "total", "gap aux", "gap aux-BF");
    for c in &report.cells {
        println!("{:>4} {:>12.4e} {:>12.4e} {:>12.4e}", c.n, c.total, c.gap_aux, c.gap_aux_bf);
    }
    for curve in [&report.total, &report.gap_aux, &report.gap_aux_bf] {
        let slope = curve.fit.as_ref().map_or(f64::NAN, |f| f.slope);
        println!(
            "{:<11} slope {:>7.3}  envelope {}  monotone {}",
            curve.label, slope, curve.bound.envelope, curve.bound.monotone
        );
    }
    println!("triangle excess {:.2e}", report.triangle_excess);
    Ok(())
}
