use crate::error::{Result, TfdError};
use serde::{Deserialize, Serialize};

/// Default bound on the Fock dimension Π(cutoff+1).
pub const DEFAULT_MAX_FOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// σ = +1 for bosons, −1 for fermions.
    pub fn sigma(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn from_sigma(sigma: i32) -> Result<Self> {
        match sigma {
            1 => Ok(Statistics::Boson),
            -1 => Ok(Statistics::Fermion),
            s => Err(TfdError::Config(format!("statistics sign must be +1 or -1, got {s}"))),
        }
    }

    pub fn is_fermion(self) -> bool {
        self == Statistics::Fermion
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub bare_energy: f64,
    pub statistics: Statistics,
    pub cutoff: usize,
}

impl ModeSpec {
    pub fn boson(bare_energy: f64, cutoff: usize) -> Self {
        ModeSpec {
            bare_energy,
            statistics: Statistics::Boson,
            cutoff,
        }
    }

    /// Fermion modes always have cutoff 1.
    pub fn fermion(bare_energy: f64) -> Self {
        ModeSpec {
            bare_energy,
            statistics: Statistics::Fermion,
            cutoff: 1,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.statistics.sigma()
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !self.bare_energy.is_finite() {
            return Err(TfdError::Config(format!("mode {index}: bare energy must be finite")));
        }
        match self.statistics {
            Statistics::Boson if self.cutoff < 1 => {
                Err(TfdError::Config(format!("mode {index}: boson cutoff must be >= 1")))
            }
            Statistics::Fermion if self.cutoff != 1 => {
                Err(TfdError::Config(format!("mode {index}: fermion cutoff must be 1")))
            }
            _ => Ok(()),
        }
    }
}

/// Enumerated doubled basis |m,n⟩⟩.
///
/// Fock states are ordered lexicographically with mode 0 most significant;
/// the Liouville index of |m,n⟩⟩ is `m * dim_h + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiouvilleBasis {
    modes: Vec<ModeSpec>,
    strides: Vec<usize>,
    dim_h: usize,
    occupations: Vec<Vec<usize>>,
    fermion_count: Vec<usize>,
}

impl LiouvilleBasis {
    pub fn new(modes: Vec<ModeSpec>) -> Result<Self> {
        Self::with_limit(modes, DEFAULT_MAX_FOCK)
    }

    pub fn with_limit(modes: Vec<ModeSpec>, max_fock: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(TfdError::Config("mode list is empty".into()));
        }
        for (i, m) in modes.iter().enumerate() {
            m.validate(i)?;
        }
        let product: u128 = modes.iter().map(|m| m.cutoff as u128 + 1).product();
        if product > max_fock as u128 {
            return Err(TfdError::DimensionOverflow {
                product,
                limit: max_fock,
                cutoffs: modes.iter().map(|m| m.cutoff).collect(),
            });
        }
        let dim_h = product as usize;
        let mut strides = vec![1usize; modes.len()];
        for j in (0..modes.len().saturating_sub(1)).rev() {
            strides[j] = strides[j + 1] * (modes[j + 1].cutoff + 1);
        }
        let occupations: Vec<Vec<usize>> = (0..dim_h)
            .map(|idx| {
                modes
                    .iter()
                    .zip(&strides)
                    .map(|(m, s)| (idx / s) % (m.cutoff + 1))
                    .collect()
            })
            .collect();
        let fermion_count = occupations
            .iter()
            .map(|occ| {
                occ.iter()
                    .zip(&modes)
                    .filter(|(_, m)| m.statistics.is_fermion())
                    .map(|(o, _)| *o)
                    .sum()
            })
            .collect();
        Ok(LiouvilleBasis {
            modes,
            strides,
            dim_h,
            occupations,
            fermion_count,
        })
    }

    pub fn modes(&self) -> &[ModeSpec] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_l(&self) -> usize {
        self.dim_h * self.dim_h
    }

    pub fn check_mode(&self, j: usize) -> Result<()> {
        if j < self.modes.len() {
            Ok(())
        } else {
            Err(TfdError::InvalidMode {
                index: j,
                modes: self.modes.len(),
            })
        }
    }

    /// Fock index of an occupation tuple.
    pub fn encode_fock(&self, occ: &[usize]) -> Option<usize> {
        if occ.len() != self.modes.len() {
            return None;
        }
        let mut idx = 0;
        for ((o, m), s) in occ.iter().zip(&self.modes).zip(&self.strides) {
            if *o > m.cutoff {
                return None;
            }
            idx += o * s;
        }
        Some(idx)
    }

    pub fn decode_fock(&self, idx: usize) -> &[usize] {
        &self.occupations[idx]
    }

    /// Liouville index of |m,n⟩⟩.
    pub fn encode(&self, m: &[usize], n: &[usize]) -> Option<usize> {
        Some(self.encode_fock(m)? * self.dim_h + self.encode_fock(n)?)
    }

    pub fn decode(&self, idx: usize) -> (&[usize], &[usize]) {
        (self.decode_fock(idx / self.dim_h), self.decode_fock(idx % self.dim_h))
    }

    /// Total fermion occupation of a Fock state.
    pub fn fermion_number(&self, fock_idx: usize) -> usize {
        self.fermion_count[fock_idx]
    }

    /// Fermion occupation of modes strictly before `j` (Jordan–Wigner string).
    pub fn fermions_before(&self, fock_idx: usize, j: usize) -> usize {
        self.occupations[fock_idx][..j]
            .iter()
            .zip(&self.modes)
            .filter(|(_, m)| m.statistics.is_fermion())
            .map(|(o, _)| *o)
            .sum()
    }

    /// Whether all boson occupations of a Fock state are ≤ cutoff − margin.
    pub fn fock_interior(&self, fock_idx: usize, margin: usize) -> bool {
        self.occupations[fock_idx]
            .iter()
            .zip(&self.modes)
            .all(|(o, m)| m.statistics.is_fermion() || o + margin <= m.cutoff)
    }

    /// Interior test for a Liouville index (both m and n).
    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        self.fock_interior(idx / self.dim_h, margin) && self.fock_interior(idx % self.dim_h, margin)
    }

    pub fn has_fermions(&self) -> bool {
        self.modes.iter().any(|m| m.statistics.is_fermion())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let b = LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 3)]).unwrap();
        assert_eq!((b.dim_h(), b.dim_l()), (4, 16));
        let b = LiouvilleBasis::new(vec![ModeSpec::fermion(1.0)]).unwrap();
        assert_eq!((b.dim_h(), b.dim_l()), (2, 4));
        let b = LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 2), ModeSpec::boson(1.0, 1)]).unwrap();
        assert_eq!((b.dim_h(), b.dim_l()), (6, 36));
    }

    #[test]
    fn lexicographic_order() {
        let b = LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 2), ModeSpec::boson(1.0, 1)]).unwrap();
        assert_eq!(b.decode_fock(0), &[0, 0]);
        assert_eq!(b.decode_fock(1), &[0, 1]);
        assert_eq!(b.decode_fock(2), &[1, 0]);
        assert_eq!(b.encode(&[1, 0], &[0, 1]), Some(2 * 6 + 1));
    }

    #[test]
    fn overflow_names_product() {
        let err = LiouvilleBasis::with_limit(vec![ModeSpec::boson(1.0, 9); 3], 100).unwrap_err();
        match err {
            TfdError::DimensionOverflow { product, .. } => assert_eq!(product, 1000),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn invalid_modes_rejected() {
        assert!(LiouvilleBasis::new(vec![]).is_err());
        assert!(LiouvilleBasis::new(vec![ModeSpec::boson(1.0, 0)]).is_err());
        let bad = ModeSpec {
            bare_energy: 1.0,
            statistics: Statistics::Fermion,
            cutoff: 2,
        };
        assert!(LiouvilleBasis::new(vec![bad]).is_err());
    }
}
