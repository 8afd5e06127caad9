//! Run configurations for the `horotube` binary.
//!
//! A configuration is one JSON object naming a command and the inputs it
//! needs. [`validate`] collects every field-level problem before anything
//! runs; [`run`] dispatches to a verifier and returns its [`Report`].

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bergman::{self, Side, WeightSpec};
use crate::crown::{self, ProbeSettings, UpperNilpotent};
use crate::error::Result;
use crate::extension;
use crate::field::{read_dump, Field, SpectralGrid};
use crate::poisson::{self, min_resolvable_level, Normalization, Params};
use crate::report::Report;
use crate::specfun;
use crate::testfns::TestFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Transform,
    Slice,
    DeltaAsymptotics,
    Admissibility,
    Isometry,
    BanachNorm,
    NormLimit,
    Extension,
    CrownProbe,
    SpecfunSelftest,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Transform,
        Command::Slice,
        Command::DeltaAsymptotics,
        Command::Admissibility,
        Command::Isometry,
        Command::BanachNorm,
        Command::NormLimit,
        Command::Extension,
        Command::CrownProbe,
        Command::SpecfunSelftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Transform => "transform",
            Command::Slice => "slice",
            Command::DeltaAsymptotics => "delta-asymptotics",
            Command::Admissibility => "admissibility",
            Command::Isometry => "isometry",
            Command::BanachNorm => "banach-norm",
            Command::NormLimit => "norm-limit",
            Command::Extension => "extension",
            Command::CrownProbe => "crown-probe",
            Command::SpecfunSelftest => "specfun-selftest",
        }
    }

    fn from_name(s: &str) -> Option<Command> {
        Command::ALL.into_iter().find(|c| c.name() == s)
    }

    /// Top-level fields the command cannot run without.
    fn required(self) -> &'static [&'static str] {
        match self {
            Command::Transform => &["params", "grid", "input", "a"],
            Command::Slice => &["params", "grid", "input", "a", "y"],
            Command::DeltaAsymptotics => &["params"],
            Command::Admissibility => &["params", "weight"],
            Command::Isometry | Command::BanachNorm | Command::NormLimit => &["params", "weight", "grid", "input"],
            Command::Extension => &["params", "grid", "input"],
            Command::CrownProbe => &["crown"],
            Command::SpecfunSelftest => &[],
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub alpha: f64,
    #[serde(default = "default_side")]
    pub side: Side,
}

fn default_side() -> Side {
    Side::Fourier
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub extent: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum InputConfig {
    Builtin(TestFunction),
    Dump(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrownConfig {
    pub n: usize,
    /// Row-major strictly upper-triangular `Y`.
    pub y: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_radius")]
    pub radius: f64,
}

fn default_samples() -> usize {
    crown::DEFAULT_SAMPLES
}

fn default_radius() -> f64 {
    crown::DEFAULT_RADIUS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default)]
    pub params: Option<Params>,
    #[serde(default)]
    pub weight: Option<WeightConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub input: Option<InputConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// Level `a` for `transform` and `slice`.
    #[serde(default)]
    pub a: Option<f64>,
    /// Imaginary shift for `slice`.
    #[serde(default)]
    pub y: Option<Vec<f64>>,
    /// Levels `a` (isometry, banach-norm, norm-limit) or `t` (extension).
    #[serde(default)]
    pub levels: Option<Vec<f64>>,
    #[serde(default)]
    pub gammas: Option<Vec<f64>>,
    /// Bracket in `α` for the admissibility threshold search.
    #[serde(default)]
    pub bracket: Option<[f64; 2]>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default = "default_normalization")]
    pub normalization: Normalization,
    #[serde(default)]
    pub crown: Option<CrownConfig>,
}

fn default_normalization() -> Normalization {
    Normalization::Normalized
}

/// Field-level configuration problems.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<String>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration:")?;
        for e in &self.0 {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

fn valid_commands() -> String {
    Command::ALL.iter().map(|c| c.name()).collect::<Vec<_>>().join(", ")
}

fn field_error<T: for<'de> Deserialize<'de>>(
    obj: &serde_json::Map<String, Value>,
    key: &str,
    errs: &mut Vec<String>,
) -> Option<T> {
    let v = obj.get(key)?;
    if v.is_null() {
        return None;
    }
    match serde_json::from_value::<T>(v.clone()) {
        Ok(t) => Some(t),
        Err(e) => {
            let msg = e.to_string();
            if key == "params" && msg.contains("Re λ") {
                errs.push(format!("params.lambda: {msg} (Re λ > 0 is required)"));
            } else {
                errs.push(format!("{key}: {msg}"));
            }
            None
        }
    }
}

const KNOWN: [&str; 15] = [
    "command",
    "params",
    "weight",
    "grid",
    "input",
    "output_dir",
    "seed",
    "a",
    "y",
    "levels",
    "gammas",
    "bracket",
    "tolerance",
    "normalization",
    "crown",
];

/// Parses and checks a configuration, reporting every problem found.
pub fn validate(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| ConfigError(vec![format!("line {} column {}: {e}", e.line(), e.column())]))?;
    let Some(obj) = value.as_object() else {
        return Err(ConfigError(vec!["top level: expected a JSON object".into()]));
    };
    let mut errs = Vec::new();
    for k in obj.keys() {
        if !KNOWN.contains(&k.as_str()) {
            errs.push(format!("{k}: unknown field"));
        }
    }
    let command = match obj.get("command") {
        None => {
            errs.push(format!("command: missing; valid commands are {}", valid_commands()));
            None
        }
        Some(Value::String(s)) => {
            let c = Command::from_name(s);
            if c.is_none() {
                errs.push(format!("command: unknown command '{s}'; valid commands are {}", valid_commands()));
            }
            c
        }
        Some(_) => {
            errs.push(format!("command: expected a string; valid commands are {}", valid_commands()));
            None
        }
    };
    let params: Option<Params> = field_error(obj, "params", &mut errs);
    let weight: Option<WeightConfig> = field_error(obj, "weight", &mut errs);
    let grid: Option<GridConfig> = field_error(obj, "grid", &mut errs);
    let input: Option<InputConfig> = field_error(obj, "input", &mut errs);
    let crown: Option<CrownConfig> = field_error(obj, "crown", &mut errs);
    if let Some(c) = command {
        for key in c.required() {
            if obj.get(*key).is_none_or(Value::is_null) {
                errs.push(format!("{key}: required by command '{c}'"));
            }
        }
    }
    if let Some(w) = weight {
        if !(w.alpha > 0.0 && w.alpha.is_finite()) {
            errs.push(format!("weight.alpha: must be positive and finite, got {}", w.alpha));
        }
    }
    if let (Some(g), Some(p)) = (grid, params) {
        if let Err(e) = SpectralGrid::new(p.n(), g.extent, g.points) {
            errs.push(format!("grid: {e}"));
        }
    }
    if let Some(InputConfig::Builtin(tf)) = &input {
        if let Err(e) = tf.validate() {
            errs.push(format!("input.builtin: {e}"));
        }
    }
    if let Some(cc) = &crown {
        if let Err(e) = UpperNilpotent::new(cc.n, cc.y.clone()) {
            errs.push(format!("crown.y: {e}"));
        }
        if cc.samples == 0 || !(cc.radius > 0.0) {
            errs.push("crown: samples and radius must be positive".into());
        }
    }
    if !errs.is_empty() {
        return Err(ConfigError(errs));
    }
    // Remaining scalar fields are checked by the typed parse.
    let cfg: RunConfig = serde_json::from_value(value).map_err(|e| ConfigError(vec![e.to_string()]))?;
    if let (Some(y), Some(p)) = (&cfg.y, cfg.params) {
        if y.len() != p.n() {
            return Err(ConfigError(vec![format!("y: expected {} components, got {}", p.n(), y.len())]));
        }
    }
    if cfg.a.is_some_and(|a| !(a > 0.0)) {
        return Err(ConfigError(vec!["a: must be positive".into()]));
    }
    Ok(cfg)
}

/// Output directory: `--output`, then `OUTPUT_DIR`, then the config, then `out`.
pub fn output_dir(cli: Option<&Path>, env: Option<&str>, cfg: &RunConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// `count` points from `hi` down to `lo`, geometrically spaced.
fn geometric(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| hi * (lo / hi).powf(i as f64 / (count - 1) as f64)).collect()
}

impl RunConfig {
    fn params(&self) -> Params {
        self.params.expect("validated")
    }

    fn weight(&self) -> Result<WeightSpec> {
        let w = self.weight.expect("validated");
        WeightSpec::new(w.alpha, w.side, self.params())
    }

    fn grid(&self) -> Result<SpectralGrid> {
        let g = self.grid.expect("validated");
        SpectralGrid::new(self.params().n(), g.extent, g.points)
    }

    fn field(&self) -> Result<Field> {
        match self.input.as_ref().expect("validated") {
            InputConfig::Builtin(tf) => tf.sample(self.grid()?),
            InputConfig::Dump(path) => {
                let f = read_dump(path)?;
                f.grid().check_same(&self.grid()?)?;
                Ok(f)
            }
        }
    }
}

/// Executes the configured verifier. Numerical failures are returned as
/// errors; the caller turns them into a failed report.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let tol = cfg.tolerance;
    match cfg.command {
        Command::Transform | Command::Slice => {
            let p = cfg.params();
            let y = cfg.y.clone().unwrap_or_else(|| vec![0.0; p.n()]);
            poisson::dual_path(&cfg.field()?, cfg.a.expect("validated"), &y, &p, tol.unwrap_or(1e-6))
        }
        Command::DeltaAsymptotics => {
            let gammas = cfg.gammas.clone().unwrap_or_else(|| geometric(0.5, 1e-3, 12));
            poisson::delta_asymptotics(&cfg.params(), &gammas)
        }
        Command::Admissibility => {
            let w = cfg.weight()?;
            let mut report = bergman::admissibility(&w)?;
            if let Some([lo, hi]) = cfg.bracket {
                let t = bergman::admissibility_threshold(&cfg.params(), lo, hi, 0.05)?;
                report.absorb("threshold", &t);
                report.value("threshold", &t.values);
            }
            Ok(report)
        }
        Command::Isometry => {
            let levels = cfg.levels.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0, 4.0]);
            bergman::level_isometry(&[cfg.field()?], &levels, &cfg.weight()?, cfg.normalization, tol.unwrap_or(1e-5))
        }
        Command::BanachNorm => {
            let levels = cfg.levels.clone().unwrap_or_else(|| geometric(10.0, 1e-4, 21));
            bergman::banach_norm(&cfg.field()?, &cfg.weight()?, &levels, cfg.normalization)
        }
        Command::NormLimit => {
            let f = cfg.field()?;
            let levels = cfg.levels.clone().unwrap_or_else(|| geometric(1.0, min_resolvable_level(f.grid()), 10));
            bergman::norm_limit(&f, &cfg.weight()?, &levels, tol.unwrap_or(0.02))
        }
        Command::Extension => {
            let f = cfg.field()?;
            let p = cfg.params();
            let levels = cfg.levels.clone().unwrap_or_else(|| geometric(1.0, min_resolvable_level(f.grid()), 10));
            let psi = extension::extend(&f, &levels, &p)?;
            let mut report = Report::new("extension", serde_json::json!({ "params": p, "levels": levels }));
            report.absorb("consistency", &extension::consistency(&f, &psi, 1e-8)?);
            report.absorb("recovery", &extension::boundary_recovery(&f, &psi, tol.unwrap_or(5e-2), 4)?);
            let dt = 1e-2;
            let conv = extension::ode_convergence(&f, &p, 0.5, &[dt, dt / 2.0, dt / 4.0])?;
            report.absorb("ode", &conv);
            report.value("ode", &conv.values);
            Ok(report.finish())
        }
        Command::CrownProbe => {
            let c = cfg.crown.as_ref().expect("validated");
            let y = UpperNilpotent::new(c.n, c.y.clone())?;
            let settings =
                ProbeSettings { sample_count: c.samples, radius: c.radius, seed: cfg.seed, ..Default::default() };
            crown::tube_probe(&y, &settings)
        }
        Command::SpecfunSelftest => specfun::selftest(cfg.seed),
    }
}

/// Report for a run aborted by a numerical error.
pub fn failure_report(cfg: &RunConfig, err: &crate::error::Error) -> Report {
    let mut r = Report::new(cfg.command.name(), cfg);
    r.check_flag("completed", false);
    r.note(&err.to_string());
    r.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_isometry_config() {
        let cfg = validate(
            r#"{"command": "isometry", "params": {"n": 1, "lambda": 0.75}, "weight": {"alpha": 1.0},
                "grid": {"extent": 16, "points": 1024}, "input": {"builtin": {"name": "gaussian", "width": 1.0}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Command::Isometry);
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn zero_real_part_rejected() {
        let err =
            validate(r#"{"command": "delta-asymptotics", "params": {"n": 1, "lambda": [0.0, 1.0]}}"#).unwrap_err();
        assert!(err.0.iter().any(|e| e.contains("Re λ > 0")), "{err}");
    }

    #[test]
    fn unknown_command_lists_valid_ones() {
        let err = validate(r#"{"command": "frobnicate"}"#).unwrap_err();
        let msg = err.to_string();
        for c in Command::ALL {
            assert!(msg.contains(c.name()), "{msg}");
        }
    }

    #[test]
    fn missing_and_unknown_fields() {
        let err = validate(r#"{"command": "transform", "params": {"n": 1, "lambda": 1}, "colour": 3}"#).unwrap_err();
        for key in ["colour", "grid", "input", "a"] {
            assert!(err.0.iter().any(|e| e.starts_with(key)), "{key}: {err}");
        }
    }

    #[test]
    fn syntax_error_has_position() {
        let err = validate("{\n  \"command\": }").unwrap_err();
        assert!(err.0[0].starts_with("line 2"), "{err}");
    }

    #[test]
    fn output_precedence() {
        let mut cfg = validate(r#"{"command": "specfun-selftest", "output_dir": "cfg"}"#).unwrap();
        assert_eq!(output_dir(Some(Path::new("flag")), Some("env"), &cfg), PathBuf::from("flag"));
        assert_eq!(output_dir(None, Some("env"), &cfg), PathBuf::from("env"));
        assert_eq!(output_dir(None, None, &cfg), PathBuf::from("cfg"));
        cfg.output_dir = None;
        assert_eq!(output_dir(None, None, &cfg), PathBuf::from("out"));
    }
}
