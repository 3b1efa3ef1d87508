//! JSON experiment configuration. Schema errors are reported with the JSON
//! pointer of the offending value.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::chabauty::PhysicalMap;
use crate::counting::OrderedFamily;
use crate::cutproject::{CutProject, Scheme, Window};
use crate::lattice::{Grid, Region};
use crate::numfield::{minkowski_lattice, NumberField, OrderBasis};
use crate::transforms::{Mode, TestFunction};
use crate::{Error, Result};

/// Number-field data: defining polynomial (ascending degree), integral basis
/// columns as rational strings, number of copies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub min_poly: Vec<i64>,
    #[serde(default)]
    pub order_basis: Option<Vec<Vec<String>>>,
    #[serde(default = "one")]
    pub copies: usize,
    #[serde(default)]
    pub normalize: bool,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    #[serde(default)]
    pub field: Option<FieldSpec>,
    /// Explicit basis columns, used when no field is given.
    #[serde(default)]
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub translation: Option<Vec<f64>>,
    /// Physical dimension; the first `d` coordinates are physical.
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub t: f64,
    #[serde(default)]
    pub omega: Option<Vec<[f64; 2]>>,
    pub sample_count: usize,
    #[serde(default)]
    pub torus_randomize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { radius: f64 },
}

impl RegionSpec {
    pub fn to_region(&self, d: usize) -> Region {
        match self {
            RegionSpec::Box { lo, hi } => Region::Box { lo: lo.clone(), hi: hi.clone() },
            RegionSpec::Ball { radius } => Region::ball(d, *radius),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountingConfig {
    pub family: OrderedFamilyKind,
    pub t_list: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderedFamilyKind {
    Balls,
    Boxes,
    Slices,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchConfig {
    pub radius: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    /// Rotations by `base^-k` radians (d = 2).
    Rotation { base: f64, k: Vec<i32> },
    /// Translations by `base^-k` along `direction`.
    Translation { base: f64, k: Vec<i32>, direction: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChabautyConfig {
    pub radius: f64,
    pub eps_floor: f64,
    pub perturbations: PerturbationSpec,
    /// Probe the set whose window is translated to contain the origin in its
    /// interior, so that no truncation point sits on the window boundary.
    #[serde(default)]
    pub center_window: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxDimConfig {
    pub scales: Vec<f64>,
    /// Replaces the window boundary by a Koch polyline of this depth.
    #[serde(default)]
    pub koch_iterations: Option<u32>,
}

/// Pass/fail thresholds for the `verify-*` commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub z_max: f64,
    pub rogers_band: f64,
    pub excess_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { z_max: 3.0, rogers_band: 4.0, excess_max: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeSpec,
    pub window: Window,
    #[serde(default = "affine")]
    pub mode: Mode,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub cap: Option<u64>,
    #[serde(default)]
    pub out_dir: Option<String>,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub test_function: Option<TestFunction>,
    #[serde(default)]
    pub sampler: Option<SamplerConfig>,
    #[serde(default)]
    pub rogers_radii: Option<Vec<f64>>,
    #[serde(default)]
    pub probe_radius: Option<f64>,
    #[serde(default)]
    pub counting: Option<CountingConfig>,
    #[serde(default)]
    pub patches: Option<PatchConfig>,
    #[serde(default)]
    pub chabauty: Option<ChabautyConfig>,
    #[serde(default)]
    pub boxdim: Option<BoxDimConfig>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn affine() -> Mode {
    Mode::Affine
}

fn config_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::Config { pointer: pointer.into(), message: message.into() }
}

/// Renders a serde path as a JSON pointer (`/a/b/0`).
fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => {
                out.pop();
            }
        }
    }
    if out.is_empty() {
        out.push('/');
    }
    out
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let p = pointer(e.path());
            config_err(&p, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks the constraints the schema cannot express.
    pub fn validate(&self) -> Result<()> {
        let s = &self.scheme;
        match (&s.field, &s.basis) {
            (Some(_), Some(_)) => return Err(config_err("/scheme", "give either `field` or `basis`, not both")),
            (None, None) => return Err(config_err("/scheme", "one of `field` or `basis` is required")),
            (Some(f), None) => {
                if f.copies == 0 {
                    return Err(config_err("/scheme/field/copies", "must be at least 1"));
                }
                if f.min_poly.len() < 2 || f.min_poly.last() != Some(&1) {
                    return Err(config_err("/scheme/field/min_poly", "must be monic of degree at least 1"));
                }
            }
            (None, Some(b)) => {
                let n = b.len();
                if let Some(i) = b.iter().position(|c| c.len() != n) {
                    return Err(config_err(&format!("/scheme/basis/{i}"), format!("expected {n} entries")));
                }
            }
        }
        if self.window.dim() == 0 {
            return Err(config_err("/window/m", "must be positive"));
        }
        Window::new(self.window.dim(), self.window.pieces().to_vec())
            .map_err(|e| config_err("/window/pieces", e.to_string()))?;
        if let Some(sp) = &self.sampler {
            if sp.sample_count == 0 {
                return Err(config_err("/sampler/sample_count", "must be at least 1"));
            }
            if !(sp.t >= 0.0 && sp.t.is_finite()) {
                return Err(config_err("/sampler/t", "must be finite and nonnegative"));
            }
            if let Some(om) = &sp.omega {
                if let Some(i) = om.iter().position(|[a, b]| !(a <= b)) {
                    return Err(config_err(&format!("/sampler/omega/{i}"), "interval must satisfy lo ≤ hi"));
                }
            }
        }
        if let Some(f) = &self.test_function {
            f.validate().map_err(|e| config_err("/test_function", e.to_string()))?;
        }
        if let Some(c) = &self.counting {
            if c.t_list.is_empty() || c.t_list.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(config_err("/counting/t_list", "must be nonempty and strictly increasing"));
            }
        }
        if let Some(c) = &self.chabauty {
            if !(c.eps_floor > 0.0 && c.eps_floor < 1.0) {
                return Err(config_err("/chabauty/eps_floor", "must lie in (0, 1)"));
            }
        }
        Ok(())
    }

    /// The seed, with `--seed` taking precedence; mandatory for stochastic runs.
    pub fn seed(&self, override_seed: Option<u64>) -> Result<u64> {
        override_seed.or(self.seed).ok_or_else(|| config_err("/seed", "a seed is required for stochastic experiments"))
    }

    pub fn grid(&self) -> Result<Grid> {
        let s = &self.scheme;
        let grid = if let Some(f) = &s.field {
            let field = NumberField::new(f.min_poly.clone())
                .map_err(|e| config_err("/scheme/field/min_poly", e.to_string()))?;
            let order = match &f.order_basis {
                Some(cols) => OrderBasis::from_strings(field, cols)
                    .map_err(|e| config_err("/scheme/field/order_basis", e.to_string()))?,
                None => OrderBasis::power_basis(field),
            };
            minkowski_lattice(&order, f.copies, f.normalize).map_err(|e| config_err("/scheme/field", e.to_string()))?
        } else {
            let cols = s.basis.as_ref().expect("validated");
            Grid::from_columns(cols).map_err(|e| config_err("/scheme/basis", e.to_string()))?
        };
        match &s.translation {
            Some(t) if t.len() != grid.dim() => {
                Err(config_err("/scheme/translation", format!("expected {} entries", grid.dim())))
            }
            Some(t) => grid.with_translation(DVector::from_column_slice(t)),
            None => Ok(grid),
        }
    }

    pub fn cut_project(&self) -> Result<CutProject> {
        let grid = self.grid()?;
        let n = grid.dim();
        let d = self.scheme.d;
        if d == 0 || d >= n {
            return Err(config_err("/scheme/d", format!("must lie in 1..{n}")));
        }
        if self.window.dim() != n - d {
            return Err(config_err("/window/m", format!("expected internal dimension {}", n - d)));
        }
        CutProject::new(Scheme::split(d, n - d), grid, self.window.clone())
    }

    pub fn ordered_family(&self, d: usize) -> Result<(OrderedFamily, Vec<f64>)> {
        let c = self.counting.as_ref().ok_or_else(|| config_err("/counting", "missing section"))?;
        let family = match c.family {
            OrderedFamilyKind::Balls => OrderedFamily::Balls { d },
            OrderedFamilyKind::Boxes => OrderedFamily::Boxes { d },
            OrderedFamilyKind::Slices => OrderedFamily::Slices { d, window: self.window.clone() },
        };
        Ok((family, c.t_list.clone()))
    }
}

impl PerturbationSpec {
    pub fn maps(&self, d: usize) -> Result<Vec<PhysicalMap>> {
        match self {
            PerturbationSpec::Rotation { base, k } => {
                if d != 2 {
                    return Err(config_err("/chabauty/perturbations", "rotations need d = 2"));
                }
                Ok(k.iter().map(|&k| PhysicalMap::rotation(base.powi(-k))).collect())
            }
            PerturbationSpec::Translation { base, k, direction } => {
                if direction.len() != d {
                    return Err(config_err("/chabauty/perturbations/direction", format!("expected {d} entries")));
                }
                Ok(k.iter()
                    .map(|&k| PhysicalMap::translation(direction.iter().map(|v| v * base.powi(-k)).collect()))
                    .collect())
            }
        }
    }
}

/// `[lo, hi]` pairs to the sampler's tuple form, or the unit cube.
pub fn omega_or_default(omega: &Option<Vec<[f64; 2]>>, d: usize) -> Vec<(f64, f64)> {
    match omega {
        Some(v) => v.iter().map(|[a, b]| (*a, *b)).collect(),
        None => vec![(0.0, 1.0); d * d.saturating_sub(1) / 2],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIB: &str = r#"{
        "scheme": {"field": {"min_poly": [-1, -1, 1]}, "d": 1},
        "window": {"m": 1, "pieces": [{"kind": "box", "lo": [0.0], "hi": [1.0]}]},
        "seed": 42
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = ExperimentConfig::from_json(FIB).unwrap();
        let cp = cfg.cut_project().unwrap();
        assert!((cp.density().unwrap() - 1.0 / 5f64.sqrt()).abs() < 1e-12);
        assert_eq!(cfg.seed(None).unwrap(), 42);
        assert_eq!(cfg.seed(Some(7)).unwrap(), 7);
    }

    #[test]
    fn errors_carry_json_pointers() {
        let bad = FIB.replace(r#""lo": [0.0]"#, r#""lo": ["zero"]"#);
        match ExperimentConfig::from_json(&bad) {
            // tagged pieces are buffered, so the pointer stops at the piece
            Err(Error::Config { pointer, .. }) => assert_eq!(pointer, "/window/pieces/0"),
            other => panic!("{other:?}"),
        }
        let bad = FIB.replace(r#""d": 1"#, r#""d": 1, "colour": 3"#);
        assert!(
            matches!(ExperimentConfig::from_json(&bad), Err(Error::Config { pointer, .. }) if pointer.starts_with("/scheme"))
        );
        let bad = FIB.replace(r#""seed": 42"#, r#""sampler": {"t": 1.0, "sample_count": 0}"#);
        assert!(
            matches!(ExperimentConfig::from_json(&bad), Err(Error::Config { pointer, .. }) if pointer == "/sampler/sample_count")
        );
    }

    #[test]
    fn seed_is_mandatory_for_stochastic_runs() {
        let cfg = ExperimentConfig::from_json(&FIB.replace(
            r#",
        "seed": 42"#,
            "",
        ))
        .unwrap();
        assert!(matches!(cfg.seed(None), Err(Error::Config { pointer, .. }) if pointer == "/seed"));
    }

    #[test]
    fn dimension_checks() {
        let bad = FIB.replace(r#""d": 1"#, r#""d": 2"#);
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(cfg.cut_project(), Err(Error::Config { pointer, .. }) if pointer == "/scheme/d"));
    }
}
