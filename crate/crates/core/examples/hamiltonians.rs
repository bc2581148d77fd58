//! Assembly of the many-body, auxiliary and Bogoliubov-Froehlich
//! Hamiltonians and their momentum blocks.

use bfdyn::lattice::{preset_potential, ModeSet, ModelParams, PotentialKind};
use bfdyn::operators::{assemble_aux, assemble_bf, assemble_full, block_decompose, Model};

fn main() -> bfdyn::Result<()> {
    let modes = ModeSet::new(1, 1)?;
    let model = Model::new(
        modes.clone(),
        preset_potential("soft", PotentialKind::Pair, &modes, 1.0)?,
        preset_potential("gauss", PotentialKind::Tracer, &modes, 1.0)?,
        ModelParams::new(6, 1.0, 2)?,
    )?;

    let (sector, h) = assemble_full(&model)?;
    let (_, aux) = assemble_aux(&model)?;
    let (bf_basis, bf) = assemble_bf(&model, 8)?;
    for (name, op) in [("H_N", &h), ("H^aux", &aux), ("H^BF", &bf)] {
        println!(
            "{name:<6} dim {:>4}  nnz {:>5}  hermiticity {:.1e}",
            op.dim(),
            op.matrix().nnz(),
            op.hermiticity_deviation()
        );
    }

    let blocks = block_decompose(&h, &sector)?;
    println!("\nH_N splits into {} momentum blocks:", blocks.len());
    for b in blocks.blocks() {
        println!("  P = {:<10} dim {}", b.momentum, b.indices.len());
    }
    let bf_blocks = block_decompose(&bf, &bf_basis)?;
    println!("H^BF splits into {} momentum blocks", bf_blocks.len());
    Ok(())
}
