use std::fmt;

use sha2::{Digest, Sha256};

use super::combinatorics::{multiset_count, rank_multiset, unrank_multiset, Binomials};
use crate::error::{Error, Result};
use crate::lattice::{ModeSet, Momentum, DEFAULT_BASIS_LIMIT};

/// Identifies the basis a vector or operator is expressed in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisTag {
    hash: String,
    dim: usize,
}

impl BasisTag {
    pub fn from_descriptor(descriptor: &str, dim: usize) -> Self {
        let digest = Sha256::digest(descriptor.as_bytes());
        let hash = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Self { hash, dim }
    }

    /// Tag for an anonymous space of the given dimension (random test
    /// operators, Krylov subspaces).
    pub fn plain(dim: usize) -> Self {
        Self::from_descriptor(&format!("plain({dim})"), dim)
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.hash, self.dim)
    }
}

/// An ordered occupation-number basis over a set of "local" modes.
pub trait OccupationBasis: Send + Sync {
    fn dim(&self) -> usize;

    /// Number of modes the occupation vectors range over.
    fn mode_count(&self) -> usize;

    fn mode_set(&self) -> &ModeSet;

    /// Mode-set index of local mode `local`.
    fn global_mode(&self, local: usize) -> usize;

    /// Local index of a mode-set index, if the basis carries that mode.
    fn local_mode(&self, global: usize) -> Option<usize>;

    fn unrank_into(&self, index: usize, occ: &mut [u32]);

    /// Index of `occ`, or `None` when it is not an element of the basis.
    fn rank(&self, occ: &[u32]) -> Option<usize>;

    /// Number of bosons outside the condensate mode.
    fn excitations(&self, occ: &[u32]) -> u32;

    fn descriptor(&self) -> String;

    fn tag(&self) -> BasisTag {
        BasisTag::from_descriptor(&self.descriptor(), self.dim())
    }

    fn mode_momentum(&self, local: usize) -> Momentum {
        self.mode_set().momentum(self.global_mode(local))
    }

    fn occupation(&self, index: usize) -> Vec<u32> {
        let mut occ = vec![0; self.mode_count()];
        self.unrank_into(index, &mut occ);
        occ
    }

    fn momentum_of(&self, occ: &[u32]) -> Momentum {
        occ.iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .fold(Momentum::ZERO, |acc, (l, &n)| acc + self.mode_momentum(l) * n as i32)
    }

    /// `N_+` on every basis element.
    fn number_diagonal(&self) -> Vec<f64> {
        let mut occ = vec![0; self.mode_count()];
        (0..self.dim())
            .map(|i| {
                self.unrank_into(i, &mut occ);
                self.excitations(&occ) as f64
            })
            .collect()
    }

    /// Total boson momentum of every basis element.
    fn momentum_diagonal(&self) -> Vec<Momentum> {
        let mut occ = vec![0; self.mode_count()];
        (0..self.dim())
            .map(|i| {
                self.unrank_into(i, &mut occ);
                self.momentum_of(&occ)
            })
            .collect()
    }
}

fn checked_dim(count: Option<u128>, limit: usize) -> Result<usize> {
    match count {
        Some(c) if c <= limit as u128 => Ok(c as usize),
        Some(c) => Err(Error::DimensionLimit { requested: c, limit }),
        None => Err(Error::DimensionLimit { requested: u128::MAX, limit }),
    }
}

/// All occupation vectors over every mode with total exactly `N`: the
/// occupation representation of the symmetric N-boson space.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    modes: ModeSet,
    n_bosons: u32,
    dim: usize,
    binom: Binomials,
}

impl SectorBasis {
    pub fn new(modes: &ModeSet, n_bosons: u32) -> Result<Self> {
        Self::with_limit(modes, n_bosons, DEFAULT_BASIS_LIMIT)
    }

    pub fn with_limit(modes: &ModeSet, n_bosons: u32, limit: usize) -> Result<Self> {
        let dim = checked_dim(multiset_count(n_bosons, modes.len()), limit)?;
        let binom = Binomials::new(n_bosons as usize + modes.len(), n_bosons as usize + 1);
        Ok(Self { modes: modes.clone(), n_bosons, dim, binom })
    }

    pub fn n_bosons(&self) -> u32 {
        self.n_bosons
    }

    pub fn condensate_mode(&self) -> usize {
        self.modes.zero_index()
    }
}

impl OccupationBasis for SectorBasis {
    fn dim(&self) -> usize {
        self.dim
    }

    fn mode_count(&self) -> usize {
        self.modes.len()
    }

    fn mode_set(&self) -> &ModeSet {
        &self.modes
    }

    fn global_mode(&self, local: usize) -> usize {
        local
    }

    fn local_mode(&self, global: usize) -> Option<usize> {
        (global < self.modes.len()).then_some(global)
    }

    fn unrank_into(&self, index: usize, occ: &mut [u32]) {
        debug_assert!(index < self.dim);
        unrank_multiset(&self.binom, index as u64, self.n_bosons, occ);
    }

    fn rank(&self, occ: &[u32]) -> Option<usize> {
        if occ.iter().sum::<u32>() != self.n_bosons {
            return None;
        }
        Some(rank_multiset(&self.binom, occ) as usize)
    }

    fn excitations(&self, occ: &[u32]) -> u32 {
        self.n_bosons - occ[self.modes.zero_index()]
    }

    fn descriptor(&self) -> String {
        format!("sector({},N={})", self.modes.descriptor(), self.n_bosons)
    }
}

/// Occupation vectors over the non-condensate modes with total at most the
/// cap `M`: the truncated excitation Fock space. Ordered by total excitation
/// number, then by multiset rank; index 0 is the vacuum.
#[derive(Clone, Debug)]
pub struct ExcitationBasis {
    modes: ModeSet,
    cap: u32,
    local_to_global: Vec<usize>,
    global_to_local: Vec<Option<usize>>,
    level_offsets: Vec<usize>,
    binom: Binomials,
}

impl ExcitationBasis {
    pub fn new(modes: &ModeSet, cap: u32) -> Result<Self> {
        Self::with_limit(modes, cap, DEFAULT_BASIS_LIMIT)
    }

    pub fn with_limit(modes: &ModeSet, cap: u32, limit: usize) -> Result<Self> {
        let local_to_global = modes.nonzero_indices();
        let m = local_to_global.len();
        let mut global_to_local = vec![None; modes.len()];
        for (l, &g) in local_to_global.iter().enumerate() {
            global_to_local[g] = Some(l);
        }
        let mut level_offsets = Vec::with_capacity(cap as usize + 2);
        let mut total: u128 = 0;
        for n in 0..=cap {
            level_offsets.push(total as usize);
            let level = multiset_count(n, m)
                .ok_or(Error::DimensionLimit { requested: u128::MAX, limit })?;
            total = total
                .checked_add(level)
                .ok_or(Error::DimensionLimit { requested: u128::MAX, limit })?;
            if total > limit as u128 {
                return Err(Error::DimensionLimit { requested: total, limit });
            }
        }
        level_offsets.push(total as usize);
        let binom = Binomials::new(cap as usize + m.max(1), cap as usize + 1);
        Ok(Self {
            modes: modes.clone(),
            cap,
            local_to_global,
            global_to_local,
            level_offsets,
            binom,
        })
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Index range of the elements with exactly `n` excitations.
    pub fn level_range(&self, n: u32) -> std::ops::Range<usize> {
        self.level_offsets[n as usize]..self.level_offsets[n as usize + 1]
    }

    /// Index of the basis element with one boson in mode-set index `global`.
    pub fn single(&self, global: usize) -> Option<usize> {
        let l = self.global_to_local.get(global).copied().flatten()?;
        let mut occ = vec![0; self.mode_count()];
        occ[l] = 1;
        self.rank(&occ)
    }
}

impl OccupationBasis for ExcitationBasis {
    fn dim(&self) -> usize {
        *self.level_offsets.last().unwrap()
    }

    fn mode_count(&self) -> usize {
        self.local_to_global.len()
    }

    fn mode_set(&self) -> &ModeSet {
        &self.modes
    }

    fn global_mode(&self, local: usize) -> usize {
        self.local_to_global[local]
    }

    fn local_mode(&self, global: usize) -> Option<usize> {
        self.global_to_local.get(global).copied().flatten()
    }

    fn unrank_into(&self, index: usize, occ: &mut [u32]) {
        // level offsets are increasing; find n with offsets[n] <= index < offsets[n+1]
        let n = self.level_offsets.partition_point(|&o| o <= index) - 1;
        let within = (index - self.level_offsets[n]) as u64;
        unrank_multiset(&self.binom, within, n as u32, occ);
    }

    fn rank(&self, occ: &[u32]) -> Option<usize> {
        let n: u32 = occ.iter().sum();
        if n > self.cap {
            return None;
        }
        Some(self.level_offsets[n as usize] + rank_multiset(&self.binom, occ) as usize)
    }

    fn excitations(&self, occ: &[u32]) -> u32 {
        occ.iter().sum()
    }

    fn descriptor(&self) -> String {
        format!("excitations({},cap={})", self.modes.descriptor(), self.cap)
    }
}
