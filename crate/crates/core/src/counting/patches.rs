//! `R`-patches keyed by exact lattice-coordinate differences, their acceptance
//! windows `W_Δ` and predicted frequencies `vol(W_Δ)/covol(ℒ)`.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cutproject::{CutProject, ModelSet, Window};
use crate::lattice::{enumerate_points_with, Domain, EnumerationOptions, ProductDomain, Region};
use crate::spatial::CellIndex;
use crate::{Error, Result};

use super::BoxSet;

const QMC_POINTS: usize = 1 << 16;
const SEARCH_SLACK: f64 = 1e-9;

/// `B(0, R) ∩ (Λ − x)` recorded through the lift differences of its points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Patch {
    /// Lift of the center `x`.
    pub center: Vec<i64>,
    /// Sorted lift differences, including the zero vector.
    pub key: Vec<Vec<i64>>,
}

/// FNV-1a over the little-endian bytes of the key entries.
pub fn key_hash(key: &[Vec<i64>]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in key {
        for c in w {
            for byte in c.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    h
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Extracts patches of a fixed radius from one generated model set.
pub struct PatchExtractor<'a> {
    cp: &'a CutProject,
    ms: &'a ModelSet,
    index: CellIndex,
    radius: f64,
}

impl<'a> PatchExtractor<'a> {
    pub fn new(cp: &'a CutProject, ms: &'a ModelSet, radius: f64) -> Self {
        let cell = radius.max(ms.valid_radius() / (ms.len().max(1) as f64).sqrt()).max(1e-6);
        Self { cp, ms, index: CellIndex::new(ms.phys_points(), cell), radius }
    }

    /// The patch at the `i`-th point of the model set.
    pub fn extract(&self, i: usize) -> Result<Patch> {
        let p = &self.ms.points[i];
        if !self.ms.region().covers_ball(&p.phys, self.radius) {
            return Err(Error::IncompleteSupport {
                needed: norm(&p.phys) + self.radius,
                valid: self.ms.valid_radius(),
            });
        }
        let mut key: Vec<Vec<i64>> = self
            .index
            .within(&p.phys, self.radius + SEARCH_SLACK)
            .into_iter()
            .map(|j| self.ms.points[j].lift.iter().zip(&p.lift).map(|(a, b)| a - b).collect::<Vec<i64>>())
            .filter(|w| norm(&self.cp.scheme().project_phys(&self.cp.grid().lattice_vector(w))) <= self.radius)
            .collect();
        key.sort();
        Ok(Patch { center: p.lift.clone(), key })
    }
}

/// The patch of radius `radius` at the point `x` of `ms`.
pub fn extract_patch(cp: &CutProject, ms: &ModelSet, x: &[f64], radius: f64) -> Result<Patch> {
    let i = ms
        .points
        .iter()
        .position(|p| p.phys.iter().zip(x).all(|(a, b)| (a - b).abs() <= SEARCH_SLACK))
        .ok_or_else(|| Error::InvalidArgument(format!("{x:?} is not a generated point of the model set")))?;
    PatchExtractor::new(cp, ms, radius).extract(i)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowVolume {
    pub value: f64,
    /// False when the value is a quasi-Monte-Carlo estimate.
    pub exact: bool,
    /// Estimated absolute error; zero when exact.
    pub error: f64,
}

/// `W_Δ = W ∩ ⋂_{w ∈ key} (W − π_int w) ∖ ⋃_{w ∈ candidates ∖ key} (W − π_int w)`.
#[derive(Debug, Clone)]
pub struct PatchWindow {
    window: Window,
    required: Vec<Vec<f64>>,
    forbidden: Vec<Vec<f64>>,
}

impl PatchWindow {
    pub fn contains(&self, x: &[f64]) -> bool {
        let shifted = |v: &Vec<f64>| x.iter().zip(v).map(|(a, b)| a + b).collect::<Vec<f64>>();
        self.window.contains(x)
            && self.required.iter().all(|v| self.window.contains(&shifted(v)))
            && !self.forbidden.iter().any(|v| self.window.contains(&shifted(v)))
    }

    /// Exact for unions of boxes, quasi-Monte-Carlo otherwise.
    pub fn volume(&self) -> WindowVolume {
        if self.window.is_box_union() {
            let base = BoxSet::from_disjoint(self.window.pieces().iter().map(|p| p.bounding_box()).collect());
            let neg = |v: &Vec<f64>| v.iter().map(|a| -a).collect::<Vec<f64>>();
            let mut acc = base.clone();
            for v in &self.required {
                acc = acc.intersection(&base.translated(&neg(v)));
            }
            for v in &self.forbidden {
                if acc.is_empty() {
                    break;
                }
                acc = acc.difference(&base.translated(&neg(v)));
            }
            return WindowVolume { value: acc.volume(), exact: true, error: 0.0 };
        }
        self.qmc_volume()
    }

    fn qmc_volume(&self) -> WindowVolume {
        let Some((lo, hi)) = self.window.bounding_box() else {
            return WindowVolume { value: 0.0, exact: true, error: 0.0 };
        };
        let m = lo.len();
        let bbox: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
        let hits: usize = (1..=QMC_POINTS)
            .into_par_iter()
            .filter(|&i| {
                let x: Vec<f64> = (0..m)
                    .map(|k| lo[k] + (hi[k] - lo[k]) * radical_inverse(i as u64, PRIMES[k % PRIMES.len()]))
                    .collect();
                self.contains(&x)
            })
            .count();
        let p = hits as f64 / QMC_POINTS as f64;
        WindowVolume { value: p * bbox, exact: false, error: bbox * (p * (1.0 - p) / QMC_POINTS as f64).sqrt() }
    }
}

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Van der Corput radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0 / b as f64;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f /= b as f64;
    }
    r
}

/// One observed patch class.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchClass {
    pub key: Vec<Vec<i64>>,
    pub multiplicity: u64,
    pub predicted: f64,
    pub predicted_error: f64,
    pub empirical: f64,
}

impl PatchClass {
    pub fn key_hash(&self) -> u64 {
        key_hash(&self.key)
    }

    /// `|empirical − predicted| / predicted`.
    pub fn rel_error(&self) -> f64 {
        (self.empirical - self.predicted).abs() / self.predicted
    }
}

/// Patch classes of the points in `B(0, T)`, most frequent first.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchStats {
    pub classes: Vec<PatchClass>,
    pub total: u64,
    pub region_volume: f64,
    pub density: f64,
}

impl PatchStats {
    pub fn predicted_sum(&self) -> f64 {
        self.classes.iter().map(|c| c.predicted).sum()
    }
}

/// Candidate lattice vectors for patches of radius `R`, computed once and
/// reused for every patch window.
pub struct PatchAtlas {
    cp: CutProject,
    radius: f64,
    candidates: Vec<(Vec<i64>, Vec<f64>)>,
}

impl PatchAtlas {
    /// Candidates are the nonzero lattice vectors `w` with `|π_phys w| ≤ R`
    /// and `π_int w` in the difference set `W − W`.
    pub fn new(cp: &CutProject, radius: f64, opts: &EnumerationOptions) -> Result<Self> {
        let scheme = cp.scheme();
        let mut candidates = Vec::new();
        if let Some((lo, hi)) = cp.window().bounding_box() {
            let width: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
            let diff = Region::Box {
                lo: width.iter().map(|w| -w).collect(),
                hi: width.iter().map(|w| w + SEARCH_SLACK).collect(),
            };
            let ball = Region::ball(scheme.d(), radius);
            let domain = ProductDomain::new(
                scheme.n(),
                vec![(scheme.phys_coords().to_vec(), &ball as &dyn Domain), (scheme.int_coords().to_vec(), &diff)],
            );
            for p in enumerate_points_with(&cp.grid().linear_part(), &domain, opts)? {
                if p.coords.iter().any(|&c| c != 0) {
                    candidates.push((p.coords, scheme.project_int(&p.point)));
                }
            }
        }
        Ok(Self { cp: cp.clone(), radius, candidates })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn candidates(&self) -> usize {
        self.candidates.len()
    }

    pub fn window_for(&self, key: &[Vec<i64>]) -> Result<PatchWindow> {
        let mut required = Vec::new();
        let mut forbidden = Vec::new();
        let mut matched = 0;
        for (w, v) in &self.candidates {
            if key.binary_search(w).is_ok() {
                required.push(v.clone());
                matched += 1;
            } else {
                forbidden.push(v.clone());
            }
        }
        let nonzero = key.iter().filter(|w| w.iter().any(|&c| c != 0)).count();
        if matched != nonzero {
            return Err(Error::InvalidArgument("patch key is not drawn from this scheme at this radius".into()));
        }
        Ok(PatchWindow { window: self.cp.window().clone(), required, forbidden })
    }

    /// `vol(W_Δ) / covol(ℒ)`, with the volume's error estimate scaled alike.
    pub fn predicted_frequency(&self, key: &[Vec<i64>]) -> Result<(f64, f64)> {
        let vol = self.window_for(key)?.volume();
        let covol = self.cp.grid().covolume();
        Ok((vol.value / covol, vol.error / covol))
    }

    /// Tabulates the patches of all points in `B(0, T)`.
    pub fn tabulate(&self, t: f64, opts: &EnumerationOptions) -> Result<PatchStats> {
        let d = self.cp.d();
        let ms = self.cp.generate_with(&Region::ball(d, t + self.radius), opts)?;
        let inner = Region::ball(d, t);
        let extractor = PatchExtractor::new(&self.cp, &ms, self.radius);
        let keys: Vec<Vec<Vec<i64>>> = (0..ms.len())
            .into_par_iter()
            .filter(|&i| inner.contains(&ms.points[i].phys))
            .map(|i| extractor.extract(i).map(|p| p.key))
            .collect::<Result<_>>()?;
        let mut counts: BTreeMap<Vec<Vec<i64>>, u64> = BTreeMap::new();
        for k in keys {
            *counts.entry(k).or_default() += 1;
        }
        let region_volume = inner.volume().expect("ball volume");
        let total = counts.values().sum();
        let mut classes = counts
            .into_iter()
            .map(|(key, multiplicity)| {
                let (predicted, predicted_error) = self.predicted_frequency(&key)?;
                Ok(PatchClass {
                    key,
                    multiplicity,
                    predicted,
                    predicted_error,
                    empirical: multiplicity as f64 / region_volume,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        classes.sort_by(|a, b| b.multiplicity.cmp(&a.multiplicity).then_with(|| a.key.cmp(&b.key)));
        Ok(PatchStats { classes, total, region_volume, density: self.cp.density()? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutproject::presets;

    #[test]
    fn integer_control_patch() {
        let cp = presets::integer_control(1);
        let ms = cp.generate(&Region::ball(1, 10.0)).unwrap();
        let p = extract_patch(&cp, &ms, &[3.0], 1.5).unwrap();
        assert_eq!(p.key, vec![vec![-1, 0], vec![0, 0], vec![1, 0]]);
        let p = extract_patch(&cp, &ms, &[3.0], 0.0).unwrap();
        assert_eq!(p.key, vec![vec![0, 0]]);
        assert!(matches!(extract_patch(&cp, &ms, &[9.5], 1.5), Err(Error::InvalidArgument(_))));
        assert!(matches!(extract_patch(&cp, &ms, &[9.0], 1.5), Err(Error::IncompleteSupport { .. })));
    }

    #[test]
    fn zero_radius_window_is_the_window() {
        let cp = presets::ammann_beenker();
        let atlas = PatchAtlas::new(&cp, 0.0, &Default::default()).unwrap();
        let key = vec![vec![0; 4]];
        let vol = atlas.window_for(&key).unwrap().volume();
        assert!(vol.exact && (vol.value - 1.0).abs() < 1e-12);
        let (f, _) = atlas.predicted_frequency(&key).unwrap();
        assert!((f - 0.125).abs() < 1e-12);
    }

    #[test]
    fn fibonacci_classes_partition_the_window() {
        let cp = presets::fibonacci();
        for r in [1.2, 3.0] {
            let atlas = PatchAtlas::new(&cp, r, &Default::default()).unwrap();
            let stats = atlas.tabulate(300.0, &Default::default()).unwrap();
            assert!((stats.predicted_sum() - stats.density).abs() < 1e-6, "R={r}");
            assert_eq!(stats.total, stats.classes.iter().map(|c| c.multiplicity).sum::<u64>());
        }
    }

    #[test]
    fn keys_are_translation_invariant() {
        let cp = presets::fibonacci();
        let ms = cp.generate(&Region::ball(1, 60.0)).unwrap();
        let ex = PatchExtractor::new(&cp, &ms, 3.0);
        let inner: Vec<usize> = (0..ms.len()).filter(|&i| ms.points[i].phys[0].abs() < 50.0).collect();
        for &i in &inner {
            for &j in &inner {
                let (a, b) = (ex.extract(i).unwrap(), ex.extract(j).unwrap());
                let rel = |k: usize| -> Vec<i64> {
                    let mut v: Vec<i64> = ms
                        .points
                        .iter()
                        .filter(|q| (q.phys[0] - ms.points[k].phys[0]).abs() <= 3.0)
                        .map(|q| ((q.phys[0] - ms.points[k].phys[0]) * 1e6).round() as i64)
                        .collect();
                    v.sort();
                    v
                };
                assert_eq!(a.key == b.key, rel(i) == rel(j));
            }
        }
    }

    #[test]
    fn qmc_agrees_with_exact_volume() {
        let cp = presets::ammann_beenker();
        let atlas = PatchAtlas::new(&cp, 1.5, &Default::default()).unwrap();
        let stats = atlas.tabulate(20.0, &Default::default()).unwrap();
        for c in stats.classes.iter().take(3) {
            let w = atlas.window_for(&c.key).unwrap();
            let exact = w.volume();
            let qmc = w.qmc_volume();
            assert!((exact.value - qmc.value).abs() <= 5.0 * qmc.error + 1e-3, "{exact:?} {qmc:?}");
        }
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(key_hash(&[]), 0xcbf2_9ce4_8422_2325);
        assert_ne!(key_hash(&[vec![0, 1]]), key_hash(&[vec![1, 0]]));
    }
}
