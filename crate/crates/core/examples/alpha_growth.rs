//! Excitation growth alpha(t) under the three generators, with one fitted
//! exponential rate checked on times it was not fitted to.

use bfdyn::diagnostics::{alpha_trace, fit_growth_rate, uniform_grid, Flavor, InitialKind};
use bfdyn::lattice::{preset_potential, ModeSet, ModelParams, Momentum, PotentialKind};
use bfdyn::operators::Model;
use bfdyn::propagator::PropagationConfig;

fn main() -> bfdyn::Result<()> {
    let modes = ModeSet::new(1, 1)?;
    let base = Model::new(
        modes.clone(),
        preset_potential("soft", PotentialKind::Pair, &modes, 1.0)?,
        preset_potential("soft", PotentialKind::Tracer, &modes, 1.0)?,
        ModelParams::new(4, 1.0, 2)?,
    )?;
    let initial = InitialKind::Single { p: Momentum::unit(0), q: Momentum::ZERO };
    let cfg = PropagationConfig::new(0.0);
    let forward = uniform_grid(2.0, 20);
    // held out: the mirrored grid and the midpoints
    let mut held_out: Vec<f64> = forward.iter().map(|t| -t).collect();
    held_out.extend(forward.windows(2).map(|w| 0.5 * (w[0] + w[1])));

    let mut fitted = Vec::new();
    let mut checked = Vec::new();
    for n in [4, 8, 16, 32, 64] {
        let model = base.with_bosons(n)?;
        for flavor in Flavor::ALL {
            fitted.push(alpha_trace(flavor, &model, &initial, 8, &forward, &cfg)?);
            checked.push(alpha_trace(flavor, &model, &initial, 8, &held_out, &cfg)?);
        }
    }
    let v = fit_growth_rate(&fitted);
    println!("fitted rate v = {v:.4}");
    println!("{:>4} {:>5} {:>10} {:>10}", "N", "flav", "alpha(2)", "ratio");
    for (f, c) in fitted.iter().zip(&checked) {
        println!(
            "{:>4} {:>5} {:>10.5} {:>10.5}",
            f.n,
            f.flavor.name(),
            f.alpha[f.alpha.len() - 1],
            c.envelope_ratio(v)
        );
    }
    let worst = checked.iter().map(|c| c.envelope_ratio(v)).fold(0.0, f64::max);
    println!("worst held-out ratio {worst:.5} (allowed 1.05)");
    Ok(())
}
