use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;

use super::basis::BasisTag;
use crate::error::{Error, Result};

const CHECKPOINT_MAGIC: &str = "BFDYN-STATE";
const CHECKPOINT_VERSION: u32 = 1;

/// Complex amplitudes over a tagged basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    tag: BasisTag,
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(tag: BasisTag, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != tag.dim() {
            return Err(Error::InvalidInput(format!(
                "amplitude count {} does not match basis dimension {}",
                amps.len(),
                tag.dim()
            )));
        }
        if amps.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::InvalidInput("non-finite amplitude".into()));
        }
        Ok(Self { tag, amps })
    }

    pub fn zeros(tag: BasisTag) -> Self {
        let amps = vec![C64::default(); tag.dim()];
        Self { tag, amps }
    }

    pub fn basis_state(tag: BasisTag, index: usize) -> Result<Self> {
        if index >= tag.dim() {
            return Err(Error::OutOfRange { index, len: tag.dim() });
        }
        let mut s = Self::zeros(tag);
        s.amps[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn tag(&self) -> &BasisTag {
        &self.tag
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidInput("cannot normalize the zero vector".into()));
        }
        self.scale(C64::new(1.0 / n, 0.0));
        Ok(())
    }

    pub fn scale(&mut self, factor: C64) {
        self.amps.iter_mut().for_each(|a| *a *= factor);
    }

    pub fn ensure_same_basis(&self, other: &BasisTag) -> Result<()> {
        if &self.tag != other {
            return Err(Error::BasisMismatch {
                expected: self.tag.to_string(),
                found: other.to_string(),
            });
        }
        Ok(())
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.ensure_same_basis(&other.tag)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: C64, other: &StateVector) -> Result<()> {
        self.ensure_same_basis(&other.tag)?;
        self.amps.iter_mut().zip(&other.amps).for_each(|(a, b)| *a += factor * b);
        Ok(())
    }

    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.ensure_same_basis(&other.tag)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// `sum_i w_i |psi_i|^2` for a real diagonal weight.
    pub fn diagonal_expectation(&self, weights: &[f64]) -> f64 {
        assert_eq!(weights.len(), self.amps.len());
        self.amps.iter().zip(weights).map(|(a, w)| w * a.norm_sqr()).sum()
    }

    /// Versioned text checkpoint: a header with the basis hash and dimension,
    /// then one `re im` line per amplitude in round-trip precision.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}")?;
        writeln!(w, "basis {}", self.tag.hash())?;
        writeln!(w, "dim {}", self.dim())?;
        for a in &self.amps {
            writeln!(w, "{:?} {:?}", a.re, a.im)?;
        }
        Ok(())
    }

    /// Reads a checkpoint and checks it against the expected basis.
    pub fn read_checkpoint<R: BufRead>(r: R, expected: &BasisTag) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, String)> {
            match lines.next() {
                Some((i, line)) => Ok((i + 1, line?)),
                None => Err(Error::Parse { line: 0, message: format!("missing {what}") }),
            }
        };
        let (l, header) = next("header")?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some(CHECKPOINT_MAGIC) {
            return Err(Error::Parse { line: l, message: "not a state checkpoint".into() });
        }
        let version: u32 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or(Error::Parse { line: l, message: "missing version".into() })?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::Parse {
                line: l,
                message: format!("unsupported checkpoint version {version}"),
            });
        }
        let (l, basis) = next("basis line")?;
        let hash = basis
            .strip_prefix("basis ")
            .ok_or(Error::Parse { line: l, message: "expected `basis <hash>`".into() })?;
        if hash != expected.hash() {
            return Err(Error::BasisMismatch {
                expected: expected.hash().to_string(),
                found: hash.to_string(),
            });
        }
        let (l, dim) = next("dim line")?;
        let dim: usize = dim
            .strip_prefix("dim ")
            .and_then(|d| d.parse().ok())
            .ok_or(Error::Parse { line: l, message: "expected `dim <n>`".into() })?;
        let mut amps = Vec::with_capacity(dim);
        for _ in 0..dim {
            let (l, line) = next("amplitude")?;
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(re)), Some(Ok(im)), None) => amps.push(C64::new(re, im)),
                _ => {
                    return Err(Error::Parse { line: l, message: "expected `re im`".into() })
                }
            }
        }
        Self::new(expected.clone(), amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basis_mismatch_is_an_error() {
        let a = StateVector::zeros(BasisTag::from_descriptor("a", 3));
        let b = StateVector::zeros(BasisTag::from_descriptor("b", 3));
        assert!(matches!(a.inner(&b), Err(Error::BasisMismatch { .. })));
    }

    #[test]
    fn checkpoint_rejects_wrong_basis_and_version() {
        let tag = BasisTag::from_descriptor("x", 2);
        let s = StateVector::basis_state(tag.clone(), 1).unwrap();
        let mut buf = Vec::new();
        s.write_checkpoint(&mut buf).unwrap();
        let other = BasisTag::from_descriptor("y", 2);
        assert!(StateVector::read_checkpoint(&buf[..], &other).is_err());
        let text = String::from_utf8(buf).unwrap().replace("STATE 1", "STATE 9");
        assert!(StateVector::read_checkpoint(text.as_bytes(), &tag).is_err());
    }

    proptest! {
        #[test]
        fn checkpoint_round_trip(values in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..40)) {
            let tag = BasisTag::from_descriptor("prop", values.len());
            let amps = values.iter().map(|&(r, i)| C64::new(r, i)).collect();
            let s = StateVector::new(tag.clone(), amps).unwrap();
            let mut buf = Vec::new();
            s.write_checkpoint(&mut buf).unwrap();
            let back = StateVector::read_checkpoint(&buf[..], &tag).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
