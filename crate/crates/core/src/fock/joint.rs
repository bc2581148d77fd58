use super::basis::{BasisTag, OccupationBasis};
use crate::lattice::{ModeSet, Momentum};

/// Tracer plane waves tensored with a boson basis. The flattened index is
/// `tracer_index * boson_dim + boson_index`.
#[derive(Clone, Debug)]
pub struct JointBasis<B> {
    tracer: ModeSet,
    boson: B,
}

impl<B: OccupationBasis> JointBasis<B> {
    pub fn new(tracer: ModeSet, boson: B) -> Self {
        assert_eq!(
            tracer.dim(),
            boson.mode_set().dim(),
            "tracer and boson modes must share the spatial dimension"
        );
        Self { tracer, boson }
    }

    pub fn tracer(&self) -> &ModeSet {
        &self.tracer
    }

    pub fn boson(&self) -> &B {
        &self.boson
    }

    pub fn dim(&self) -> usize {
        self.tracer.len() * self.boson.dim()
    }

    #[inline]
    pub fn join(&self, tracer_index: usize, boson_index: usize) -> usize {
        tracer_index * self.boson.dim() + boson_index
    }

    #[inline]
    pub fn split(&self, index: usize) -> (usize, usize) {
        (index / self.boson.dim(), index % self.boson.dim())
    }

    pub fn descriptor(&self) -> String {
        format!("joint(tracer={},{})", self.tracer.descriptor(), self.boson.descriptor())
    }

    pub fn tag(&self) -> BasisTag {
        BasisTag::from_descriptor(&self.descriptor(), self.dim())
    }

    /// Tracer momentum plus total boson momentum, for every element.
    pub fn total_momenta(&self) -> Vec<Momentum> {
        let boson = self.boson.momentum_diagonal();
        let mut out = Vec::with_capacity(self.dim());
        for q in self.tracer.modes() {
            out.extend(boson.iter().map(|&p| *q + p));
        }
        out
    }

    /// `N_+` on every element (tracer-independent).
    pub fn number_diagonal(&self) -> Vec<f64> {
        let boson = self.boson.number_diagonal();
        let mut out = Vec::with_capacity(self.dim());
        for _ in 0..self.tracer.len() {
            out.extend_from_slice(&boson);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ExcitationBasis;

    #[test]
    fn flattening_is_bijective() {
        let m = ModeSet::new(1, 1).unwrap();
        let j = JointBasis::new(ModeSet::new(1, 2).unwrap(), ExcitationBasis::new(&m, 3).unwrap());
        assert_eq!(j.dim(), 5 * 10);
        for i in 0..j.dim() {
            let (t, b) = j.split(i);
            assert_eq!(j.join(t, b), i);
        }
    }

    #[test]
    fn total_momentum_is_additive() {
        let m = ModeSet::new(1, 1).unwrap();
        let exc = ExcitationBasis::new(&m, 2).unwrap();
        let minus_one = exc.single(m.index_of(Momentum::new(&[-1])).unwrap()).unwrap();
        let tracer = ModeSet::new(1, 1).unwrap();
        let q1 = tracer.index_of(Momentum::new(&[1])).unwrap();
        let j = JointBasis::new(tracer, exc);
        assert_eq!(j.total_momenta()[j.join(q1, minus_one)], Momentum::ZERO);
    }
}
