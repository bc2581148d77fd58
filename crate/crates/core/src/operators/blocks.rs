//! Splitting operators and states by total momentum.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use super::sparse::SparseHermitianOperator;
use crate::error::{Error, Result};
use crate::fock::{BasisTag, JointBasis, OccupationBasis, StateVector};
use crate::lattice::Momentum;

/// One momentum block: its indices in the parent basis and the restricted
/// operator.
#[derive(Clone, Debug)]
pub struct Block {
    pub momentum: Momentum,
    pub indices: Vec<usize>,
    pub operator: SparseHermitianOperator,
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    parent: BasisTag,
    blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn parent(&self) -> &BasisTag {
        &self.parent
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Restrictions of `state` to every block.
    pub fn split(&self, state: &StateVector) -> Result<Vec<StateVector>> {
        state.ensure_same_basis(&self.parent)?;
        self.blocks
            .iter()
            .map(|b| {
                let amps = b.indices.iter().map(|&i| state.amplitudes()[i]).collect();
                StateVector::new(b.operator.tag().clone(), amps)
            })
            .collect()
    }

    /// Inverse of [`split`](Self::split).
    pub fn combine(&self, parts: &[StateVector]) -> Result<StateVector> {
        if parts.len() != self.blocks.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} block states, got {}",
                self.blocks.len(),
                parts.len()
            )));
        }
        let mut out = vec![C64::default(); self.parent.dim()];
        for (b, part) in self.blocks.iter().zip(parts) {
            part.ensure_same_basis(b.operator.tag())?;
            for (&i, &a) in b.indices.iter().zip(part.amplitudes()) {
                out[i] = a;
            }
        }
        StateVector::new(self.parent.clone(), out)
    }
}

/// Splits `op` by the given per-index momenta. Fails if `op` couples
/// different momenta.
pub fn block_decompose_by(op: &SparseHermitianOperator, momenta: &[Momentum]) -> Result<BlockDecomposition> {
    if momenta.len() != op.dim() {
        return Err(Error::InvalidInput(format!(
            "{} momenta for an operator of dimension {}",
            momenta.len(),
            op.dim()
        )));
    }
    let leak = op
        .matrix()
        .triplets()
        .filter(|&(r, c, _)| momenta[r] != momenta[c])
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max);
    if leak > 0.0 {
        return Err(Error::InvalidInput(format!(
            "operator couples different total momenta (largest entry {leak:e})"
        )));
    }
    let mut groups: BTreeMap<Momentum, Vec<usize>> = BTreeMap::new();
    for (i, &p) in momenta.iter().enumerate() {
        groups.entry(p).or_default().push(i);
    }
    let blocks = groups
        .into_iter()
        .map(|(p, indices)| {
            let tag = BasisTag::from_descriptor(&format!("block({},P={})", op.tag().hash(), p), indices.len());
            let operator = SparseHermitianOperator::new(tag, op.matrix().restrict(&indices, &indices))?;
            Ok(Block { momentum: p, indices, operator })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockDecomposition { parent: op.tag().clone(), blocks })
}

/// Splits a joint operator by total (tracer plus boson) momentum.
pub fn block_decompose<B: OccupationBasis>(
    op: &SparseHermitianOperator,
    joint: &JointBasis<B>,
) -> Result<BlockDecomposition> {
    if op.tag() != &joint.tag() {
        return Err(Error::BasisMismatch {
            expected: joint.descriptor(),
            found: op.tag().to_string(),
        });
    }
    block_decompose_by(op, &joint.total_momenta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{ModeSet, ModelParams, PotentialKind, preset_potential};
    use crate::operators::{assemble_full, Model};

    fn model(v: &str, w: &str) -> Model {
        let modes = ModeSet::new(1, 1).unwrap();
        Model::new(
            modes.clone(),
            preset_potential(v, PotentialKind::Pair, &modes, 1.0).unwrap(),
            preset_potential(w, PotentialKind::Tracer, &modes, 1.0).unwrap(),
            ModelParams::new(3, 1.0, 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn blocks_partition_and_round_trip() {
        let (joint, h) = assemble_full(&model("soft", "soft")).unwrap();
        let dec = block_decompose(&h, &joint).unwrap();
        let mut distinct: Vec<_> = joint.total_momenta();
        distinct.sort();
        distinct.dedup();
        assert_eq!(dec.len(), distinct.len());
        let total: usize = dec.blocks().iter().map(|b| b.indices.len()).sum();
        assert_eq!(total, joint.dim());
        let amps = (0..joint.dim()).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let s = StateVector::new(joint.tag(), amps).unwrap();
        let back = dec.combine(&dec.split(&s).unwrap()).unwrap();
        assert_eq!(back.distance(&s).unwrap(), 0.0);
    }

    #[test]
    fn coupling_operator_is_rejected() {
        let op = SparseHermitianOperator::new(
            BasisTag::plain(2),
            crate::operators::SparseMatrix::from_triplets(
                2,
                2,
                [(0, 1, C64::new(1.0, 0.0)), (1, 0, C64::new(1.0, 0.0))],
            ),
        )
        .unwrap();
        let p = [Momentum::ZERO, Momentum::unit(0)];
        assert!(block_decompose_by(&op, &p).is_err());
    }
}
