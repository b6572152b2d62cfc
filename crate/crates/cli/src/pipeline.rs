//! Multi-step runs driven by one JSON config: rectangle, phase matrix, set,
//! evaluation.
//!
//! ```json
//! {
//!   "rectangle": { "op": "family", "family": "c1-ii", "modulus": 7, "prime": 2, "degree": 3, "trim": 1 },
//!   "hadamard": { "op": "dft", "order": 63 },
//!   "zone": [56, 56],
//!   "method": "fft",
//!   "out_dir": "artifacts"
//! }
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use drcs_core::ambiguity::{theta_max_with, AfMethod};
use drcs_core::bounds::optimality_factor;
use drcs_core::drcs::build_drcs;
use drcs_core::hadamard::{dft_matrix, kronecker, load_seed, walsh_hadamard};
use drcs_core::rectangle::{
    build_circular_florentine, build_circular_quasi_florentine, build_quasi_florentine_plus_one, product_construct,
    truncate_columns, Side,
};
use drcs_core::{Family, PhaseMatrix, Rectangle};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{read_rectangle, write_output};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub rectangle: RectStep,
    pub hadamard: BhStep,
    #[serde(default)]
    pub zone: Option<(usize, usize)>,
    #[serde(default)]
    pub method: Option<AfMethod>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum RectStep {
    CircularFlorentine { modulus: usize },
    CircularQfr { p: u32, n: u32 },
    PlusOne { p: u32, n: u32 },
    File { path: PathBuf },
    Family(Family),
    Truncate { of: Box<RectStep>, k: usize, #[serde(default)] side: Side },
    Product { outer: Box<RectStep>, inner: Box<RectStep> },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum BhStep {
    Dft { order: usize },
    Walsh { m: u32 },
    File { path: PathBuf },
    Kron { factors: Vec<BhStep> },
}

impl RectStep {
    fn build(&self, base: &Path) -> Result<Rectangle, CliError> {
        Ok(match self {
            RectStep::CircularFlorentine { modulus } => build_circular_florentine(*modulus)?,
            RectStep::CircularQfr { p, n } => build_circular_quasi_florentine(*p, *n)?,
            RectStep::PlusOne { p, n } => build_quasi_florentine_plus_one(*p, *n)?,
            RectStep::File { path } => read_rectangle(&base.join(path))?,
            RectStep::Family(f) => f.instantiate()?,
            RectStep::Truncate { of, k, side } => truncate_columns(&of.build(base)?, *k, *side)?,
            RectStep::Product { outer, inner } => product_construct(&outer.build(base)?, &inner.build(base)?)?,
        })
    }
}

impl BhStep {
    fn build(&self, base: &Path) -> Result<PhaseMatrix, CliError> {
        Ok(match self {
            BhStep::Dft { order } => dft_matrix(*order),
            BhStep::Walsh { m } => walsh_hadamard(*m),
            BhStep::File { path } => load_seed(&base.join(path))?,
            BhStep::Kron { factors } => {
                let mut iter = factors.iter();
                let first = iter
                    .next()
                    .ok_or_else(|| CliError::Validation("kron needs at least one factor".into()))?;
                let mut acc = first.build(base)?;
                for f in iter {
                    acc = kronecker(&acc, &f.build(base)?);
                }
                acc
            }
        })
    }
}

pub fn run(config_path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(config_path).map_err(|e| CliError::io(config_path, e))?;
    let config: PipelineConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))?;
    let base = config_path.parent().unwrap_or(Path::new("."));

    let rect = config.rectangle.build(base)?;
    let bh = config.hadamard.build(base)?;
    let mut set = build_drcs(&rect, &bh)?;
    if let Some((zx, zy)) = config.zone {
        set = set.with_zone(zx, zy)?;
    }
    let method = config.method.unwrap_or(AfMethod::default_for(set.len()));
    let theta = theta_max_with(&set, method);
    let bound = optimality_factor(&set, &theta);

    if let Some(dir) = &config.out_dir {
        let dir = base.join(dir);
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        write_output(Some(&dir.join("rectangle.json")), &crate::pretty(&rect))?;
        write_output(Some(&dir.join("hadamard.json")), &crate::pretty(&bh))?;
        write_output(Some(&dir.join("set.json")), set.to_json().as_bytes())?;
        write_output(Some(&dir.join("theta.json")), &crate::pretty(&theta))?;
    }

    let (bound, bound_error) = match bound {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(json!({
        "rectangle": { "N": rect.modulus(), "rows": rect.nrows(), "cols": rect.ncols() },
        "hadamard": { "N": bh.order(), "r": bh.r() },
        "set": { "K": set.set_size(), "M": set.flock_size(), "L": set.len(), "zone": set.zone() },
        "theta": theta,
        "bound": bound,
        "bound_error": bound_error,
    }))
}
