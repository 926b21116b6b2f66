//! Bipolar patterns, flip noise and pattern generators.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_dims, Error, Result};

/// A vector of ±1 entries: +1 is an active neuron, -1 an inactive one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BipolarPattern {
    values: Vec<i8>,
    label: Option<u8>,
}

impl BipolarPattern {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if let Some(index) = values.iter().position(|&v| v != 1 && v != -1) {
            return Err(Error::NotBipolar {
                index,
                value: i64::from(values[index]),
            });
        }
        Ok(Self {
            values,
            label: None,
        })
    }

    /// Sign of each entry, with zero mapped to +1.
    pub fn from_signs(values: &[f64]) -> Self {
        Self {
            values: values
                .iter()
                .map(|&v| if v >= 0.0 { 1 } else { -1 })
                .collect(),
            label: None,
        }
    }

    pub fn with_label(mut self, label: u8) -> Self {
        self.label = Some(label);
        self
    }

    pub fn label(&self) -> Option<u8> {
        self.label
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v).collect(),
            label: self.label,
        }
    }

    /// Number of positions where the two patterns differ.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        ensure_dims(self.len(), other.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a != b)
            .count())
    }

    pub fn dot(&self, other: &Self) -> Result<i64> {
        ensure_dims(self.len(), other.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| i64::from(a) * i64::from(b))
            .sum())
    }
}

/// How many entries to invert, and the seed choosing which.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoiseSpec {
    pub flip_count: usize,
    pub rng_seed: u64,
}

/// Inverts exactly `flip_count` distinct positions chosen uniformly at random.
pub fn flip_noise(pattern: &BipolarPattern, spec: &NoiseSpec) -> Result<BipolarPattern> {
    let len = pattern.len();
    if spec.flip_count > len {
        return Err(Error::FlipCountTooLarge {
            requested: spec.flip_count,
            len,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut out = pattern.clone();
    for i in sample(&mut rng, len, spec.flip_count) {
        out.values[i] = -out.values[i];
    }
    Ok(out)
}

/// Fraction of positions where `a` and `b` disagree.
pub fn error_rate(a: &BipolarPattern, b: &BipolarPattern) -> Result<f64> {
    let differing = a.hamming(b)?;
    if a.is_empty() {
        return Ok(0.0);
    }
    Ok(differing as f64 / a.len() as f64)
}

/// Builds `p` strongly overlapping patterns: a block of `n_shared` neurons
/// active in every pattern, followed by one disjoint block of `n_distinct`
/// neurons per pattern that only that pattern activates. Everything else is
/// inactive.
pub fn overlap_family(
    n_total: usize,
    n_shared: usize,
    n_distinct: usize,
    p: usize,
) -> Result<Vec<BipolarPattern>> {
    if p < 2 {
        return Err(Error::FamilyDoesNotFit(format!(
            "need at least 2 patterns, got {p}"
        )));
    }
    if n_shared == 0 || n_distinct == 0 {
        return Err(Error::FamilyDoesNotFit(
            "shared and distinguishing blocks must be non-empty".into(),
        ));
    }
    let needed = n_shared + p * n_distinct;
    if needed > n_total {
        return Err(Error::FamilyDoesNotFit(format!(
            "{n_shared} shared + {p}×{n_distinct} distinct = {needed} exceeds {n_total} neurons"
        )));
    }
    Ok((0..p)
        .map(|k| {
            let start = n_shared + k * n_distinct;
            let values = (0..n_total)
                .map(|i| {
                    if i < n_shared || (start..start + n_distinct).contains(&i) {
                        1
                    } else {
                        -1
                    }
                })
                .collect();
            BipolarPattern {
                values,
                label: None,
            }
        })
        .collect())
}

/// `p` independent uniformly random ±1 patterns of length `n_total`.
pub fn random_patterns(n_total: usize, p: usize, seed: u64) -> Result<Vec<BipolarPattern>> {
    if p == 0 {
        return Err(Error::EmptyPatterns);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..p)
        .map(|_| BipolarPattern {
            values: (0..n_total)
                .map(|_| if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect(),
            label: None,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(v: &[i8]) -> BipolarPattern {
        BipolarPattern::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_bipolar() {
        assert_eq!(
            BipolarPattern::new(vec![1, 0, -1]),
            Err(Error::NotBipolar { index: 1, value: 0 })
        );
    }

    #[test]
    fn flip_zero_and_all() {
        let p = random_patterns(50, 1, 3).unwrap().remove(0);
        let same = flip_noise(
            &p,
            &NoiseSpec {
                flip_count: 0,
                rng_seed: 9,
            },
        )
        .unwrap();
        assert_eq!(same, p);
        let all = flip_noise(
            &p,
            &NoiseSpec {
                flip_count: 50,
                rng_seed: 9,
            },
        )
        .unwrap();
        assert_eq!(all, p.negated());
    }

    #[test]
    fn flip_hundred_of_784() {
        let p = pat(&[-1; 784]);
        let noisy = flip_noise(
            &p,
            &NoiseSpec {
                flip_count: 100,
                rng_seed: 42,
            },
        )
        .unwrap();
        assert_eq!(p.hamming(&noisy).unwrap(), 100);
        assert_eq!(error_rate(&p, &noisy).unwrap(), 100.0 / 784.0);
    }

    #[test]
    fn flip_too_many() {
        let p = pat(&[1, -1]);
        assert_eq!(
            flip_noise(
                &p,
                &NoiseSpec {
                    flip_count: 3,
                    rng_seed: 0
                }
            ),
            Err(Error::FlipCountTooLarge {
                requested: 3,
                len: 2
            })
        );
    }

    #[test]
    fn error_rate_examples() {
        let a = pat(&[1, -1, 1, 1]);
        assert_eq!(error_rate(&a, &a).unwrap(), 0.0);
        assert_eq!(error_rate(&a, &a.negated()).unwrap(), 1.0);

        let x = pat(&[1; 784]);
        let mut v = vec![1i8; 784];
        for e in v.iter_mut().take(11) {
            *e = -1;
        }
        let r = error_rate(&x, &pat(&v)).unwrap();
        assert!((r - 0.01403).abs() < 1e-5);
        assert!(error_rate(&a, &x).is_err());
    }

    #[test]
    fn overlap_family_small() {
        let fam = overlap_family(8, 4, 2, 2).unwrap();
        assert_eq!(fam[0].values(), &[1, 1, 1, 1, 1, 1, -1, -1]);
        assert_eq!(fam[1].values(), &[1, 1, 1, 1, -1, -1, 1, 1]);
    }

    #[test]
    fn overlap_family_rejects() {
        assert!(overlap_family(8, 4, 2, 1).is_err());
        assert!(overlap_family(8, 4, 3, 2).is_err());
        assert!(overlap_family(64, 40, 4, 4).is_ok());
    }

    #[test]
    fn overlap_family_shares_block() {
        let fam = overlap_family(64, 40, 4, 4).unwrap();
        for a in &fam {
            for b in &fam {
                assert_eq!(a.values()[..40], b.values()[..40]);
            }
        }
    }

    #[test]
    fn random_patterns_deterministic_and_nearly_orthogonal() {
        let a = random_patterns(1000, 2, 17).unwrap();
        assert_eq!(a, random_patterns(1000, 2, 17).unwrap());
        for seed in [0u64, 1, 2, 17, 12345] {
            let ps = random_patterns(1000, 2, seed).unwrap();
            let overlap = ps[0].dot(&ps[1]).unwrap().abs() as f64 / 1000.0;
            assert!(overlap < 0.15, "seed {seed}: {overlap}");
        }
        assert!(random_patterns(10, 0, 1).is_err());
    }
}
