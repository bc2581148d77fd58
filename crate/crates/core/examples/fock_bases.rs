//! Ranked occupation bases and the excitation map between the N-boson
//! sector and the capped excitation space.

use bfdyn::fock::{ExcitationBasis, OccupationBasis, SectorBasis};
use bfdyn::lattice::ModeSet;
use bfdyn::operators::assemble_u_map;

fn main() -> bfdyn::Result<()> {
    let modes = ModeSet::new(1, 1)?;
    let n = 3;
    let sector = SectorBasis::new(&modes, n)?;
    let exc = ExcitationBasis::new(&modes, n)?;
    println!("sector N = {n}: dim {}; excitations N_+ <= {n}: dim {}", sector.dim(), exc.dim());

    for i in 0..sector.dim() {
        let occ = sector.occupation(i);
        assert_eq!(sector.rank(&occ), Some(i));
        println!("{i:>2} {occ:?} N_+ = {} P = {}", sector.excitations(&occ), sector.momentum_of(&occ));
    }

    let u = assemble_u_map(&sector, &exc)?;
    let defect = u.adjoint().matmul(&u).sub(&bfdyn::operators::SparseMatrix::identity(sector.dim()));
    println!("U_N has {} entries; ||U^* U - 1||_F = {:e}", u.nnz(), defect.frobenius_norm());
    Ok(())
}
