//! Config-driven batch runner behind the `grunsky` binary.
//!
//! A run reads one JSON config, executes one command and writes its results
//! into the output directory. Complex numbers are written `[re, im]`.
//!
//! ```json
//! {
//!   "maps": [
//!     {"kind": "affine_disk", "center": [0, 0], "radius": 1},
//!     {"kind": "quadratic", "center": [3, 0], "c": [0.1, 0]},
//!     {"kind": "joukowski_ellipse", "center": [0, 3], "c": [0.2, 0.1]},
//!     {"kind": "raw_series", "center": [-3, 0], "coeffs": [[1, 0], [0.1, 0]]}
//!   ],
//!   "order": 32,
//!   "route": "series",
//!   "quadrature": {"radial": 48, "angular": 128},
//!   "samples": 256,
//!   "transforms": [{"a": [2, 0], "b": [0, 0], "c": [0, 0], "d": [1, 0]}],
//!   "family": {"index": 0, "phi": [[0, 0], [1, 0]], "q_slope": [0, 0], "delta": 0.01},
//!   "sweep": [8, 16, 32],
//!   "out": "results"
//! }
//! ```
//!
//! Only `maps` is required. `raw_series` coefficients start at `z¹`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{build_quadrature, DEFAULT_ANGULAR, DEFAULT_RADIAL};
use crate::error::Error;
use crate::grunsky::{assemble_with, operator_norm, to_csv, to_json, truncation_sweep, Route};
use crate::map_zoo::{
    validate_rigging, ConformalMapModel, MobiusTransform, PreSchwarzianFamily, Rigging, DEFAULT_SAMPLES, ZOO_CATALOG,
};
use crate::period_map::{
    check_mobius_invariance, holomorphy_study, normalize_rigging, period, recover_jets, DEFAULT_DELTA,
};
use crate::power_series::{PowerSeries, DEFAULT_ORDER};

pub const DEFAULT_OUT: &str = "grunsky-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Compute,
    Norm,
    Invariance,
    Recover,
    Holomorphy,
    Sweep,
    ZooList,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Compute,
        Command::Norm,
        Command::Invariance,
        Command::Recover,
        Command::Holomorphy,
        Command::Sweep,
        Command::ZooList,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Compute => "compute",
            Command::Norm => "norm",
            Command::Invariance => "invariance",
            Command::Recover => "recover",
            Command::Holomorphy => "holomorphy",
            Command::Sweep => "sweep",
            Command::ZooList => "zoo-list",
        }
    }
}

impl std::str::FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::validation("command", format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSpec {
    AffineDisk { center: Complex64, radius: f64 },
    Quadratic { center: Complex64, c: Complex64 },
    JoukowskiEllipse { center: Complex64, c: Complex64 },
    RawSeries { center: Complex64, coeffs: Vec<Complex64> },
}

impl MapSpec {
    pub fn build(&self) -> crate::Result<ConformalMapModel> {
        match self {
            MapSpec::AffineDisk { center, radius } => ConformalMapModel::affine_disk(*center, *radius),
            MapSpec::Quadratic { center, c } => ConformalMapModel::quadratic(*center, *c),
            MapSpec::JoukowskiEllipse { center, c } => ConformalMapModel::joukowski_ellipse(*center, *c),
            MapSpec::RawSeries { center, coeffs } => {
                let mut all = vec![Complex64::new(0.0, 0.0)];
                all.extend_from_slice(coeffs);
                ConformalMapModel::raw_series(*center, PowerSeries::new(all), true)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub radial: usize,
    pub angular: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial: DEFAULT_RADIAL,
            angular: DEFAULT_ANGULAR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MobiusSpec {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub index: usize,
    #[serde(default)]
    pub phi: Vec<Complex64>,
    #[serde(default)]
    pub q_slope: Complex64,
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub maps: Vec<MapSpec>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub route: Route,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub transforms: Vec<MobiusSpec>,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub sweep: Vec<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::validation(
                format!("config line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::validation("--config", format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Builds and certifies the rigging.
    pub fn rigging(&self) -> Result<Rigging, CliError> {
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(k, m)| m.build().map_err(|e| CliError::from_error(format!("maps[{k}]"), e)))
            .collect::<Result<Vec<_>, _>>()?;
        validate_rigging(maps, self.samples).map_err(|e| {
            let field = match &e {
                Error::OverlappingImages { i, j, .. } => format!("maps[{i}], maps[{j}]"),
                Error::DegenerateCenters(i, j) => format!("maps[{i}].center, maps[{j}].center"),
                Error::TooFewSamples(_) => "samples".into(),
                _ => "maps".into(),
            };
            CliError::from_error(field, e)
        })
    }
}

/// A failure, tagged with the config field responsible.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub field: String,
    pub message: String,
    pub validation: bool,
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
            validation: true,
        }
    }

    pub fn from_error(field: impl Into<String>, e: Error) -> Self {
        Self {
            field: field.into(),
            validation: e.is_validation(),
            message: e.to_string(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            field: "out".into(),
            message: format!("{}: {e}", path.display()),
            validation: false,
        }
    }

    /// 1 for invalid input, 2 for numerical or I/O failure.
    pub fn exit_code(&self) -> i32 {
        if self.validation {
            1
        } else {
            2
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl std::error::Error for CliError {}

/// Command-line values that take precedence over the config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub order: Option<usize>,
    pub route: Option<Route>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Files written, in order.
    pub files: Vec<PathBuf>,
    /// Text echoed to standard output.
    pub summary: String,
}

/// Static table of map kinds.
pub fn zoo_table() -> String {
    let mut s = format!("{:<18} {:<20} {:<16} {}\n", "kind", "map", "parameters", "constraint");
    for e in ZOO_CATALOG.iter() {
        let _ = writeln!(s, "{:<18} {:<20} {:<16} {}", e.kind, e.formula, e.parameters, e.constraint);
    }
    s
}

pub fn run(command: Command, config: Option<&RunConfig>, overrides: &Overrides) -> Result<Outcome, CliError> {
    if command == Command::ZooList {
        return Ok(Outcome {
            files: Vec::new(),
            summary: zoo_table(),
        });
    }
    let config = config.ok_or_else(|| CliError::validation("--config", "a config file is required"))?;
    let order = overrides.order.unwrap_or(config.order);
    if order == 0 {
        return Err(CliError::validation("order", "order must be at least 1"));
    }
    let route = overrides.route.unwrap_or(config.route);
    let out = overrides
        .out
        .clone()
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let rigging = config.rigging()?;
    let mut writer = Writer::new(out)?;

    let mut report = String::new();
    let _ = writeln!(report, "command: {}", command.name());
    let _ = writeln!(report, "maps: {}", rigging.n());
    for (k, f) in rigging.maps().iter().enumerate() {
        let _ = writeln!(report, "  maps[{k}]: {} centered at {}", f.kind().name(), f.center());
    }
    let _ = writeln!(report, "disjointness margin: {:e}", rigging.disjointness_margin());
    let _ = writeln!(report, "order: {order}");

    match command {
        Command::Compute | Command::Norm => {
            let quad = build_quadrature(config.quadrature.radial, config.quadrature.angular)
                .map_err(|e| CliError::from_error("quadrature", e))?;
            let op = assemble_with(&rigging, order, route, Some(&quad)).map_err(|e| numeric("maps", e))?;
            let norm = operator_norm(&op).map_err(|e| numeric("order", e))?;
            let _ = writeln!(report, "route: {}", route.name());
            let _ = writeln!(report, "operator norm: {norm}");
            let _ = writeln!(report, "symmetry defect: {:e}", op.symmetry_defect());
            if command == Command::Compute {
                writer.write("operator.json", &to_json(&op, Some(norm)))?;
                writer.write("operator.csv", &to_csv(&op))?;
            } else {
                let table = NormTable {
                    n: rigging.n(),
                    order,
                    route,
                    norm,
                };
                writer.write("norm.json", &pretty(&table))?;
            }
        }
        Command::Sweep => {
            let orders = if config.sweep.is_empty() {
                vec![order]
            } else {
                config.sweep.clone()
            };
            let sweep = truncation_sweep(&rigging, &orders).map_err(|e| CliError::from_error("sweep", e))?;
            let mut csv = String::from("order,norm\n");
            for (n, s) in &sweep {
                let _ = writeln!(csv, "{n},{}", num(*s));
                let _ = writeln!(report, "N = {n}: norm {s}");
            }
            writer.write("sweep.csv", &csv)?;
        }
        Command::Invariance => {
            let transforms = if config.transforms.is_empty() {
                default_transforms(&rigging)
            } else {
                config
                    .transforms
                    .iter()
                    .enumerate()
                    .map(|(k, t)| {
                        MobiusTransform::new(t.a, t.b, t.c, t.d)
                            .map_err(|e| CliError::from_error(format!("transforms[{k}]"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?
            };
            let mut records = Vec::new();
            for (k, t) in transforms.iter().enumerate() {
                let deviation = check_mobius_invariance(&rigging, t, order)
                    .map_err(|e| CliError::from_error(format!("transforms[{k}]"), e))?;
                let _ = writeln!(report, "transforms[{k}]: deviation {deviation:e}");
                records.push(InvarianceRecord {
                    coefficients: t.coefficients(),
                    deviation,
                });
            }
            let max_deviation = records.iter().map(|r| r.deviation).fold(0.0, f64::max);
            let _ = writeln!(report, "max deviation: {max_deviation:e}");
            writer.write(
                "invariance.json",
                &pretty(&InvarianceReport {
                    order,
                    transforms: records,
                    max_deviation,
                }),
            )?;
        }
        Command::Recover => {
            let datum = period(&rigging, order, route).map_err(|e| numeric("maps", e))?;
            let (normalized, _) = normalize_rigging(&rigging).map_err(|e| numeric("maps", e))?;
            let recovery = recover_jets(&datum.grunsky, &datum.normalized_centers)
                .and_then(|r| r.with_ground_truth(&normalized))
                .map_err(|e| numeric("maps", e))?;
            if let Some(res) = &recovery.residuals {
                let _ = writeln!(report, "dprime residual: {:e}", res.dprime);
                let _ = writeln!(report, "dsecond residual: {:e}", res.dsecond);
                let _ = writeln!(report, "schwarzian residual: {:e}", res.schwarzian);
            }
            writer.write("recovery.json", &pretty(&recovery))?;
        }
        Command::Holomorphy => {
            let spec = config
                .family
                .as_ref()
                .ok_or_else(|| CliError::validation("family", "holomorphy needs a `family` entry"))?;
            if spec.index >= rigging.n() {
                return Err(CliError::validation(
                    "family.index",
                    format!("index {} out of range for {} maps", spec.index, rigging.n()),
                ));
            }
            let family = PreSchwarzianFamily::through(rigging.map(spec.index), &spec.phi, spec.q_slope)
                .map_err(|e| CliError::from_error("family", e))?;
            let study = holomorphy_study(spec.index, &rigging, &family, spec.delta, order)
                .map_err(|e| CliError::from_error("family", e))?;
            let _ = writeln!(report, "h = {}: residual {:e}", study.coarse.h, study.coarse.residual);
            let _ = writeln!(report, "h = {}: residual {:e}", study.fine.h, study.fine.residual);
            let _ = writeln!(report, "ratio {}, observed order {}", study.ratio, study.observed_order);
            writer.write("holomorphy.json", &pretty(&study))?;
        }
        Command::ZooList => unreachable!("handled above"),
    }
    writer.write("report.txt", &report)?;
    Ok(Outcome {
        files: writer.files,
        summary: report,
    })
}

fn numeric(field: &str, e: Error) -> CliError {
    let field = match &e {
        Error::SeriesIllConditioned { j, i, .. } | Error::QuadratureDiverged { j, i, .. } => {
            format!("maps[{j}], maps[{i}]")
        }
        Error::InsufficientSeriesOrder { index, .. } => format!("maps[{index}].coeffs"),
        Error::PoleInImage(k) => format!("maps[{k}]"),
        Error::DegenerateCenters(i, j) => format!("maps[{i}].center, maps[{j}].center"),
        Error::ResolutionTooLow { .. } => "quadrature".into(),
        Error::OrderTooSmall { .. } => "order".into(),
        _ => field.into(),
    };
    CliError::from_error(field, e)
}

/// Dilation, translation and an inversion centered well outside all images.
pub fn default_transforms(rigging: &Rigging) -> Vec<MobiusTransform> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let centers = rigging.centers();
    let mid = centers.iter().sum::<Complex64>() / centers.len() as f64;
    let reach = rigging
        .maps()
        .iter()
        .flat_map(|f| f.boundary_samples(64))
        .map(|b| (b - mid).norm())
        .fold(0.0, f64::max);
    let pole = mid + Complex64::new(2.0 * reach + 1.0, 0.0);
    vec![
        MobiusTransform::dilation(Complex64::new(2.0, 1.0)).expect("nonzero"),
        MobiusTransform::translation(Complex64::new(1.0, -2.0)),
        MobiusTransform::new(zero, one, one, -pole).expect("nondegenerate"),
    ]
}

#[derive(Serialize)]
struct NormTable {
    n: usize,
    #[serde(rename = "N")]
    order: usize,
    route: Route,
    norm: f64,
}

#[derive(Serialize)]
struct InvarianceRecord {
    coefficients: [Complex64; 4],
    deviation: f64,
}

#[derive(Serialize)]
struct InvarianceReport {
    #[serde(rename = "N")]
    order: usize,
    transforms: Vec<InvarianceRecord>,
    max_deviation: f64,
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes")
}

fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Self {
            dir,
            files: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.files.push(path);
        Ok(())
    }
}
