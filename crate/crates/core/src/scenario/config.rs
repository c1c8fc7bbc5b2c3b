//! Scenario files: TOML with a fixed schema.
//!
//! ```toml
//! mode = "simulate_manifold"   # verify_operators | verify_calculus | simulate_manifold | simulate_cartesian
//! seed = 0
//! degree = 0
//! output = "runs/pipe"
//!
//! [grid]
//! cells = [8, 8, 32]
//! lengths = [1.0, 1.0, 1.0]
//! cross_section = "walled"     # or "periodic"
//! axial = "periodic"           # or "truncated"
//!
//! [drift]
//! field = ["0", "0", "1 + 0.5*sin(2*pi*z)"]   # or: mach = 0.5 (constant e₃ drift)
//! alpha = "1"
//! formulation = "direct"       # or "bi_isotropic"
//! ```
//!
//! The remaining sections are `[material]` (`m0`, `m1`), `[time]` (`dt`,
//! `t_end`, `rho`), `[initial]` (`kind`, `expression`, `position`,
//! `amplitude`), `[source]` (`kind`, `expression`, `amplitude`), `[solver]`
//! (`policy`, `tolerance`), `[diagnostics]` (`snapshot_every`,
//! `support_threshold`), `[verify]` (`cases`, `pairs`, `levels`) and
//! `[cartesian]` (`order`, `modes`, `pressure_residual`).

use std::fmt;
use std::path::{Path, PathBuf};

use toml::{Table, Value};

use super::expr::Expr;
use crate::calculus::{AxisKind, GridSpec};
use crate::linalg::{SolverOptions, SolverPolicy};
use crate::wave::cartesian::StencilOrder;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    VerifyOperators,
    VerifyCalculus,
    SimulateManifold,
    SimulateCartesian,
}

impl Mode {
    const NAMES: [&'static str; 4] = ["verify_operators", "verify_calculus", "simulate_manifold", "simulate_cartesian"];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::VerifyOperators => Self::NAMES[0],
            Mode::VerifyCalculus => Self::NAMES[1],
            Mode::SimulateManifold => Self::NAMES[2],
            Mode::SimulateCartesian => Self::NAMES[3],
        }
    }

    pub fn is_verify(self) -> bool {
        matches!(self, Mode::VerifyOperators | Mode::VerifyCalculus)
    }

    fn sections(self) -> &'static [&'static str] {
        match self {
            Mode::VerifyOperators => &["verify"],
            Mode::VerifyCalculus => &["grid", "verify"],
            Mode::SimulateManifold => {
                &["grid", "drift", "material", "time", "initial", "source", "solver", "diagnostics"]
            }
            Mode::SimulateCartesian => &["grid", "drift", "time", "source", "solver", "cartesian"],
        }
    }
}

/// How the drift enters the manifold system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Drift as the operator `α∇_{X₀}M₀`.
    Direct,
    /// Drift absorbed into `M₀` by the change of unknowns; constant `mach`
    /// along `e₃`, 0-forms only.
    BiIsotropic,
}

/// An expression together with the text it was parsed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub text: String,
    pub expr: Expr,
}

impl Field {
    fn constant(v: f64) -> Self {
        Self { text: format!("{v}"), expr: Expr::Number(v) }
    }

    pub fn eval(&self, x: [f64; 3], t: f64) -> f64 {
        self.expr.eval(x, t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftConfig {
    pub mach: Option<f64>,
    pub field: Option<[Field; 3]>,
    pub alpha: Field,
    pub formulation: Formulation,
}

impl DriftConfig {
    /// The drift field, `mach·e₃` when no field expression is given.
    pub fn field_at(&self, x: [f64; 3]) -> [f64; 3] {
        match &self.field {
            Some(f) => [f[0].eval(x, 0.0), f[1].eval(x, 0.0), f[2].eval(x, 0.0)],
            None => [0.0, 0.0, self.mach.unwrap_or(0.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaterialConfig {
    pub m0: Field,
    pub m1: Field,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_end: f64,
    /// Diagnostic weight; `None` selects `2ρ₀`.
    pub rho: Option<f64>,
}

impl TimeConfig {
    /// Whole number of steps covering `t_end`.
    pub fn steps(&self) -> usize {
        let r = self.t_end / self.dt;
        let n = r.round();
        if (r - n).abs() <= 1e-9 * r.max(1.0) {
            n as usize
        } else {
            r.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialConfig {
    Zero,
    /// Uniform on `[−amplitude, amplitude]` per degree of freedom.
    Random { amplitude: f64 },
    /// `amplitude` on the first-block degree of freedom nearest `position`.
    Pulse { position: Option<[f64; 3]>, amplitude: f64 },
    /// Expression sampled at cell centres of the first block.
    Expression(Field),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SourceConfig {
    None,
    Expression(Field),
    /// Fresh uniform noise at every step.
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DiagnosticsConfig {
    pub snapshot_every: Option<usize>,
    pub support_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub cases: usize,
    pub pairs: usize,
    pub levels: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { cases: 1000, pairs: 20, levels: 2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianConfig {
    pub order: StencilOrder,
    pub modes: Vec<[i64; 3]>,
    pub pressure_residual: bool,
}

impl Default for CartesianConfig {
    fn default() -> Self {
        Self { order: StencilOrder::Fourth, modes: vec![[0, 0, 1]], pressure_residual: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Mode,
    pub seed: u64,
    pub degree: usize,
    pub output: Option<PathBuf>,
    pub grid: Option<GridSpec>,
    pub drift: DriftConfig,
    pub material: MaterialConfig,
    pub time: Option<TimeConfig>,
    pub initial: InitialConfig,
    pub source: SourceConfig,
    pub solver: SolverOptions,
    pub diagnostics: DiagnosticsConfig,
    pub verify: VerifyConfig,
    pub cartesian: CartesianConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Io { path: PathBuf, message: String },
    Syntax(String),
    /// Every violated rule, in file order.
    Invalid(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            ConfigError::Syntax(m) => write!(f, "malformed configuration: {m}"),
            ConfigError::Invalid(problems) => {
                write!(f, "invalid configuration ({} problem{}):", problems.len(), if problems.len() == 1 { "" } else { "s" })?;
                for p in problems {
                    write!(f, "\n  - {p}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn problems(&self) -> Vec<String> {
        match self {
            ConfigError::Invalid(p) => p.clone(),
            other => vec![other.to_string()],
        }
    }
}

const TOP_KEYS: &[&str] = &["mode", "seed", "degree", "output"];
const SECTIONS: &[(&str, &[&str])] = &[
    ("grid", &["cells", "lengths", "cross_section", "axial"]),
    ("drift", &["mach", "field", "alpha", "formulation"]),
    ("material", &["m0", "m1"]),
    ("time", &["dt", "t_end", "rho"]),
    ("initial", &["kind", "expression", "position", "amplitude"]),
    ("source", &["kind", "expression", "amplitude"]),
    ("solver", &["policy", "tolerance"]),
    ("diagnostics", &["snapshot_every", "support_threshold"]),
    ("verify", &["cases", "pairs", "levels"]),
    ("cartesian", &["order", "modes", "pressure_residual"]),
];

pub fn parse_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.to_path_buf(), message: e.to_string() })?;
    parse_str(&text)
}

pub fn parse_str(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
    let mut r = Reader { problems: Vec::new() };
    let cfg = r.read(&table);
    match cfg {
        Some(cfg) if r.problems.is_empty() => Ok(cfg),
        _ => Err(ConfigError::Invalid(r.problems)),
    }
}

/// The closest candidate within a small edit distance.
pub fn suggest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    let limit = (word.chars().count() / 3).max(1);
    candidates
        .into_iter()
        .map(|c| (strsim::osa_distance(word, c), c))
        .filter(|&(d, _)| d <= limit)
        .min_by_key(|&(d, _)| d)
        .map(|(_, c)| c)
}

struct Reader {
    problems: Vec<String>,
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "a string",
        Value::Integer(_) => "an integer",
        Value::Float(_) => "a number",
        Value::Boolean(_) => "a boolean",
        Value::Datetime(_) => "a date",
        Value::Array(_) => "an array",
        Value::Table(_) => "a table",
    }
}

impl Reader {
    fn problem(&mut self, msg: impl Into<String>) {
        self.problems.push(msg.into());
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v {
            Value::Float(f) => Some(*f),
            Value::Integer(i) => Some(*i as f64),
            other => {
                self.problem(format!("{path}: expected a number, found {}", type_name(other)));
                None
            }
        }
    }

    fn integer(&mut self, v: &Value, path: &str) -> Option<i64> {
        match v {
            Value::Integer(i) => Some(*i),
            other => {
                self.problem(format!("{path}: expected an integer, found {}", type_name(other)));
                None
            }
        }
    }

    fn count(&mut self, v: &Value, path: &str, min: i64) -> Option<usize> {
        let i = self.integer(v, path)?;
        if i < min {
            self.problem(format!("{path}: must be at least {min}, got {i}"));
            return None;
        }
        Some(i as usize)
    }

    fn string<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a str> {
        match v {
            Value::String(s) => Some(s),
            other => {
                self.problem(format!("{path}: expected a string, found {}", type_name(other)));
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        match v {
            Value::Boolean(b) => Some(*b),
            other => {
                self.problem(format!("{path}: expected true or false, found {}", type_name(other)));
                None
            }
        }
    }

    fn choice<T: Copy>(&mut self, v: &Value, path: &str, options: &[(&str, T)]) -> Option<T> {
        let s = self.string(v, path)?;
        if let Some((_, t)) = options.iter().find(|(name, _)| *name == s) {
            return Some(*t);
        }
        let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
        let hint = suggest(s, names.iter().copied()).map(|c| format!(" (did you mean `{c}`?)")).unwrap_or_default();
        self.problem(format!("{path}: unknown value `{s}`, expected one of {}{hint}", names.join(", ")));
        None
    }

    fn triple<T: Copy + Default>(
        &mut self,
        v: &Value,
        path: &str,
        mut item: impl FnMut(&mut Self, &Value, &str) -> Option<T>,
    ) -> Option<[T; 3]> {
        let Value::Array(a) = v else {
            self.problem(format!("{path}: expected an array of three entries, found {}", type_name(v)));
            return None;
        };
        if a.len() != 3 {
            self.problem(format!("{path}: expected three entries, found {}", a.len()));
            return None;
        }
        let mut out = [T::default(); 3];
        let mut ok = true;
        for (i, e) in a.iter().enumerate() {
            match item(self, e, &format!("{path}[{i}]")) {
                Some(x) => out[i] = x,
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn field(&mut self, v: &Value, path: &str) -> Option<Field> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Float(f) => return Some(Field::constant(*f)),
            Value::Integer(i) => return Some(Field::constant(*i as f64)),
            other => {
                self.problem(format!("{path}: expected an expression string or a number, found {}", type_name(other)));
                return None;
            }
        };
        match Expr::parse(&text) {
            Ok(expr) => Some(Field { text, expr }),
            Err(e) => {
                self.problem(format!("{path}: {e} in `{text}`"));
                None
            }
        }
    }

    fn check_keys(&mut self, table: &Table, section: Option<&str>, allowed: &[&str]) {
        for key in table.keys() {
            if allowed.contains(&key.as_str()) {
                continue;
            }
            let path = section.map_or(key.clone(), |s| format!("{s}.{key}"));
            let hint = match suggest(key, allowed.iter().copied()) {
                Some(c) => format!(" (did you mean `{c}`?)"),
                None => SECTIONS
                    .iter()
                    .find_map(|(s, keys)| suggest(key, keys.iter().copied()).map(|c| format!(" (did you mean `{s}.{c}`?)")))
                    .unwrap_or_default(),
            };
            self.problem(format!("unknown key `{path}`{hint}"));
        }
    }

    fn read(&mut self, top: &Table) -> Option<ScenarioConfig> {
        let section_names: Vec<&str> = SECTIONS.iter().map(|(s, _)| *s).collect();
        for (key, value) in top {
            if TOP_KEYS.contains(&key.as_str()) {
                continue;
            }
            if section_names.contains(&key.as_str()) {
                if !value.is_table() {
                    self.problem(format!("`{key}` must be a [{key}] section, found {}", type_name(value)));
                }
                continue;
            }
            let hint = suggest(key, TOP_KEYS.iter().copied().chain(section_names.iter().copied()))
                .map(|c| format!(" (did you mean `{c}`?)"))
                .unwrap_or_default();
            let what = if value.is_table() { "section" } else { "key" };
            self.problem(format!("unknown {what} `{key}`{hint}"));
        }
        let empty = Table::new();
        let sec = |name: &str| top.get(name).and_then(Value::as_table);
        for (name, keys) in SECTIONS {
            if let Some(t) = sec(name) {
                self.check_keys(t, Some(name), keys);
            }
        }

        let mode = match top.get("mode") {
            None => {
                self.problem(format!("missing required key `mode` (one of {})", Mode::NAMES.join(", ")));
                None
            }
            Some(v) => self.choice(
                v,
                "mode",
                &[
                    (Mode::NAMES[0], Mode::VerifyOperators),
                    (Mode::NAMES[1], Mode::VerifyCalculus),
                    (Mode::NAMES[2], Mode::SimulateManifold),
                    (Mode::NAMES[3], Mode::SimulateCartesian),
                ],
            ),
        };
        let seed = match top.get("seed") {
            None => 0,
            Some(v) => match self.integer(v, "seed") {
                Some(s) if s >= 0 => s as u64,
                Some(s) => {
                    self.problem(format!("seed: must be non-negative, got {s}"));
                    0
                }
                None => 0,
            },
        };
        let degree = match top.get("degree") {
            None => 0,
            Some(v) => match self.integer(v, "degree") {
                Some(d @ 0..=2) => d as usize,
                Some(d) => {
                    self.problem(format!("degree: must be 0, 1 or 2, got {d}"));
                    0
                }
                None => 0,
            },
        };
        let output = top.get("output").and_then(|v| self.string(v, "output")).map(PathBuf::from);

        if let Some(mode) = mode {
            for name in &section_names {
                if top.get(*name).is_some_and(Value::is_table) && !mode.sections().contains(name) {
                    self.problem(format!("section [{name}] is not used by mode {}", mode.as_str()));
                }
            }
            if top.contains_key("degree") && mode != Mode::SimulateManifold {
                self.problem(format!("degree is only used by mode simulate_manifold, not {}", mode.as_str()));
            }
        }

        let grid = sec("grid").map(|g| self.grid(g));
        let grid = grid.flatten();
        let drift = self.drift(sec("drift").unwrap_or(&empty));
        let material = self.material(sec("material").unwrap_or(&empty));
        let time = sec("time").and_then(|t| self.time(t));
        let initial = self.initial(sec("initial").unwrap_or(&empty));
        let source = self.source(sec("source").unwrap_or(&empty));
        let solver = self.solver(sec("solver").unwrap_or(&empty));
        let diagnostics = self.diagnostics(sec("diagnostics").unwrap_or(&empty));
        let verify = self.verify(sec("verify").unwrap_or(&empty));
        let cartesian = self.cartesian(sec("cartesian").unwrap_or(&empty));

        let mode = mode?;
        let cfg = ScenarioConfig {
            mode,
            seed,
            degree,
            output,
            grid,
            drift,
            material,
            time,
            initial,
            source,
            solver,
            diagnostics,
            verify,
            cartesian,
        };
        self.consistency(&cfg, top);
        Some(cfg)
    }

    fn grid(&mut self, t: &Table) -> Option<GridSpec> {
        let cells = match t.get("cells") {
            None => {
                self.problem("grid.cells: missing (three cell counts)");
                None
            }
            Some(v) => self.triple(v, "grid.cells", |r, e, p| r.count(e, p, 2)),
        };
        let lengths = match t.get("lengths") {
            None => Some([1.0; 3]),
            Some(v) => self.triple(v, "grid.lengths", |r, e, p| {
                let x = r.number(e, p)?;
                if !(x > 0.0 && x.is_finite()) {
                    r.problem(format!("{p}: must be positive, got {x}"));
                    return None;
                }
                Some(x)
            }),
        };
        let cross_section = match t.get("cross_section") {
            None => Some(AxisKind::Periodic),
            Some(v) => self.choice(v, "grid.cross_section", &[("periodic", AxisKind::Periodic), ("walled", AxisKind::Bounded)]),
        };
        let axial = match t.get("axial") {
            None => Some(AxisKind::Periodic),
            Some(v) => self.choice(v, "grid.axial", &[("periodic", AxisKind::Periodic), ("truncated", AxisKind::Bounded)]),
        };
        Some(GridSpec { cells: cells?, lengths: lengths?, cross_section: cross_section?, axial: axial? })
    }

    fn drift(&mut self, t: &Table) -> DriftConfig {
        let mach = t.get("mach").and_then(|v| self.number(v, "drift.mach"));
        let field = t.get("field").and_then(|v| self.triple_fields(v, "drift.field"));
        let alpha = t.get("alpha").and_then(|v| self.field(v, "drift.alpha")).unwrap_or_else(|| Field::constant(1.0));
        let formulation = t
            .get("formulation")
            .and_then(|v| {
                self.choice(v, "drift.formulation", &[("direct", Formulation::Direct), ("bi_isotropic", Formulation::BiIsotropic)])
            })
            .unwrap_or(Formulation::Direct);
        if t.contains_key("mach") && t.contains_key("field") {
            self.problem("drift.mach and drift.field both set; give either a constant Mach number or a field");
        }
        DriftConfig { mach, field, alpha, formulation }
    }

    fn triple_fields(&mut self, v: &Value, path: &str) -> Option<[Field; 3]> {
        let Value::Array(a) = v else {
            self.problem(format!("{path}: expected an array of three expressions, found {}", type_name(v)));
            return None;
        };
        if a.len() != 3 {
            self.problem(format!("{path}: expected three expressions, found {}", a.len()));
            return None;
        }
        let parts: Vec<Option<Field>> = a.iter().enumerate().map(|(i, e)| self.field(e, &format!("{path}[{i}]"))).collect();
        let mut it = parts.into_iter();
        Some([it.next()??, it.next()??, it.next()??])
    }

    fn material(&mut self, t: &Table) -> MaterialConfig {
        let m0 = t.get("m0").and_then(|v| self.field(v, "material.m0")).unwrap_or_else(|| Field::constant(1.0));
        let m1 = t.get("m1").and_then(|v| self.field(v, "material.m1")).unwrap_or_else(|| Field::constant(0.0));
        MaterialConfig { m0, m1 }
    }

    fn time(&mut self, t: &Table) -> Option<TimeConfig> {
        let positive = |r: &mut Self, key: &str| -> Option<f64> {
            let path = format!("time.{key}");
            match t.get(key) {
                None => {
                    r.problem(format!("{path}: missing"));
                    None
                }
                Some(v) => {
                    let x = r.number(v, &path)?;
                    if !(x > 0.0 && x.is_finite()) {
                        r.problem(format!("{path}: must be positive, got {x}"));
                        return None;
                    }
                    Some(x)
                }
            }
        };
        let dt = positive(self, "dt");
        let t_end = positive(self, "t_end");
        let rho = match t.get("rho") {
            None => None,
            Some(v) => match self.number(v, "time.rho") {
                Some(x) if x >= 0.0 => Some(x),
                Some(x) => {
                    self.problem(format!("time.rho: must be non-negative, got {x}"));
                    None
                }
                None => None,
            },
        };
        let (dt, t_end) = (dt?, t_end?);
        if dt > t_end {
            self.problem(format!("time.dt = {dt} exceeds time.t_end = {t_end}; the step must not exceed the horizon"));
            return None;
        }
        Some(TimeConfig { dt, t_end, rho })
    }

    fn amplitude(&mut self, t: &Table, section: &str) -> f64 {
        t.get("amplitude").and_then(|v| self.number(v, &format!("{section}.amplitude"))).unwrap_or(1.0)
    }

    fn initial(&mut self, t: &Table) -> InitialConfig {
        let kind = t
            .get("kind")
            .and_then(|v| self.choice(v, "initial.kind", &[("zero", 0), ("random", 1), ("pulse", 2), ("expression", 3)]));
        let amplitude = self.amplitude(t, "initial");
        let position = t.get("position").and_then(|v| self.triple(v, "initial.position", |r, e, p| r.number(e, p)));
        let expression = t.get("expression").and_then(|v| self.field(v, "initial.expression"));
        match kind.unwrap_or(0) {
            1 => InitialConfig::Random { amplitude },
            2 => InitialConfig::Pulse { position, amplitude },
            3 => match expression {
                Some(e) => InitialConfig::Expression(e),
                None => {
                    if !t.contains_key("expression") {
                        self.problem("initial.expression: required when initial.kind = \"expression\"");
                    }
                    InitialConfig::Zero
                }
            },
            _ => InitialConfig::Zero,
        }
    }

    fn source(&mut self, t: &Table) -> SourceConfig {
        let kind = t.get("kind").and_then(|v| self.choice(v, "source.kind", &[("none", 0), ("expression", 1), ("random", 2)]));
        let amplitude = self.amplitude(t, "source");
        let expression = t.get("expression").and_then(|v| self.field(v, "source.expression"));
        let kind = kind.unwrap_or(if t.contains_key("expression") { 1 } else { 0 });
        match kind {
            1 => match expression {
                Some(e) => SourceConfig::Expression(e),
                None => {
                    if !t.contains_key("expression") {
                        self.problem("source.expression: required when source.kind = \"expression\"");
                    }
                    SourceConfig::None
                }
            },
            2 => SourceConfig::Random { amplitude },
            _ => SourceConfig::None,
        }
    }

    fn solver(&mut self, t: &Table) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(p) = t.get("policy").and_then(|v| {
            self.choice(
                v,
                "solver.policy",
                &[("auto", SolverPolicy::Auto), ("krylov", SolverPolicy::Krylov), ("direct", SolverPolicy::Direct)],
            )
        }) {
            opts.policy = p;
        }
        if let Some(v) = t.get("tolerance") {
            match self.number(v, "solver.tolerance") {
                Some(x) if x > 0.0 && x < 1.0 => opts.rel_tol = x,
                Some(x) => self.problem(format!("solver.tolerance: must lie in (0, 1), got {x}")),
                None => {}
            }
        }
        opts
    }

    fn diagnostics(&mut self, t: &Table) -> DiagnosticsConfig {
        let snapshot_every = t.get("snapshot_every").and_then(|v| self.count(v, "diagnostics.snapshot_every", 1));
        let support_threshold = match t.get("support_threshold") {
            None => None,
            Some(v) => match self.number(v, "diagnostics.support_threshold") {
                Some(x) if x > 0.0 && x < 1.0 => Some(x),
                Some(x) => {
                    self.problem(format!("diagnostics.support_threshold: must lie in (0, 1), got {x}"));
                    None
                }
                None => None,
            },
        };
        DiagnosticsConfig { snapshot_every, support_threshold }
    }

    fn verify(&mut self, t: &Table) -> VerifyConfig {
        let d = VerifyConfig::default();
        VerifyConfig {
            cases: t.get("cases").and_then(|v| self.count(v, "verify.cases", 1)).unwrap_or(d.cases),
            pairs: t.get("pairs").and_then(|v| self.count(v, "verify.pairs", 1)).unwrap_or(d.pairs),
            levels: t.get("levels").and_then(|v| self.count(v, "verify.levels", 1)).unwrap_or(d.levels),
        }
    }

    fn cartesian(&mut self, t: &Table) -> CartesianConfig {
        let d = CartesianConfig::default();
        let order = t
            .get("order")
            .and_then(|v| self.choice(v, "cartesian.order", &[("second", StencilOrder::Second), ("fourth", StencilOrder::Fourth)]))
            .unwrap_or(d.order);
        let modes = match t.get("modes") {
            None => d.modes,
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .filter_map(|(i, m)| self.triple(m, &format!("cartesian.modes[{i}]"), |r, e, p| r.integer(e, p)))
                .collect(),
            Some(other) => {
                self.problem(format!("cartesian.modes: expected an array of integer triples, found {}", type_name(other)));
                d.modes
            }
        };
        let pressure_residual =
            t.get("pressure_residual").and_then(|v| self.boolean(v, "cartesian.pressure_residual")).unwrap_or(false);
        CartesianConfig { order, modes, pressure_residual }
    }

    fn consistency(&mut self, cfg: &ScenarioConfig, top: &Table) {
        let has = |sec: &str, key: &str| top.get(sec).and_then(Value::as_table).is_some_and(|t| t.contains_key(key));
        let mode = cfg.mode;
        if mode != Mode::VerifyOperators && !top.contains_key("grid") {
            self.problem(format!("section [grid] is required by mode {}", mode.as_str()));
        }
        if !mode.is_verify() && !top.contains_key("time") {
            self.problem(format!("section [time] is required by mode {}", mode.as_str()));
        }
        if mode == Mode::VerifyOperators && (has("verify", "pairs") || has("verify", "levels")) {
            self.problem("verify.pairs and verify.levels apply to verify_calculus only");
        }
        if mode == Mode::VerifyCalculus && has("verify", "cases") {
            self.problem("verify.cases applies to verify_operators only");
        }
        match mode {
            Mode::SimulateCartesian => {
                for key in ["field", "alpha", "formulation"] {
                    if has("drift", key) {
                        self.problem(format!(
                            "drift.{key} is not used by simulate_cartesian, whose drift is the constant drift.mach along e₃"
                        ));
                    }
                }
                if let Some(g) = &cfg.grid {
                    if g.cross_section != AxisKind::Periodic || g.axial != AxisKind::Periodic {
                        self.problem("simulate_cartesian needs grid.cross_section = \"periodic\" and grid.axial = \"periodic\"");
                    }
                }
                if matches!(cfg.source, SourceConfig::Random { .. }) {
                    self.problem("source.kind = \"random\" is only available in simulate_manifold");
                }
            }
            Mode::SimulateManifold if cfg.drift.formulation == Formulation::BiIsotropic => {
                if cfg.degree != 0 {
                    self.problem(format!("drift.formulation = \"bi_isotropic\" requires degree = 0, got {}", cfg.degree));
                }
                if has("drift", "field") || has("drift", "alpha") {
                    self.problem("drift.formulation = \"bi_isotropic\" takes a constant drift.mach; drop drift.field and drift.alpha");
                }
                if !has("drift", "mach") {
                    self.problem("drift.mach: required when drift.formulation = \"bi_isotropic\"");
                }
                if has("material", "m0") {
                    self.problem("material.m0 is replaced by the transformed material block when drift.formulation = \"bi_isotropic\"");
                }
            }
            _ => {}
        }
        if !matches!(cfg.initial, InitialConfig::Pulse { .. }) && has("initial", "position") {
            self.problem("initial.position applies to initial.kind = \"pulse\" only");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CARTESIAN: &str = r#"
mode = "simulate_cartesian"
[grid]
cells = [16, 16, 16]
[drift]
mach = 0.5
[time]
dt = 0.01
t_end = 1.0
"#;

    #[test]
    fn minimal_cartesian_config_is_valid() {
        let c = parse_str(CARTESIAN).unwrap();
        assert_eq!(c.mode, Mode::SimulateCartesian);
        assert_eq!(c.seed, 0);
        assert_eq!(c.drift.mach, Some(0.5));
        assert_eq!(c.time.unwrap().steps(), 100);
        assert_eq!(c.grid.unwrap().cells, [16; 3]);
    }

    #[test]
    fn step_larger_than_horizon_names_both_fields() {
        let text = CARTESIAN.replace("dt = 0.01", "dt = 2.0");
        let err = parse_str(&text).unwrap_err().to_string();
        assert!(err.contains("time.dt") && err.contains("time.t_end"), "{err}");
    }

    #[test]
    fn misspelled_key_gets_a_suggestion() {
        let text = CARTESIAN.replace("mach = 0.5", "machh = 0.5");
        let err = parse_str(&text).unwrap_err().to_string();
        assert!(err.contains("unknown key `drift.machh`") && err.contains("did you mean `mach`"), "{err}");
    }

    #[test]
    fn every_problem_is_listed() {
        let text = r#"
mode = "simulate_manifold"
degree = 5
[grid]
cells = [1, 4, "x"]
[time]
dt = -1
t_end = 1
[drift]
alpha = "1 +"
"#;
        let ConfigError::Invalid(p) = parse_str(text).unwrap_err() else { panic!() };
        assert!(p.len() >= 4, "{p:?}");
        assert!(p.iter().any(|m| m.starts_with("degree")));
        assert!(p.iter().any(|m| m.contains("grid.cells[0]")));
        assert!(p.iter().any(|m| m.contains("grid.cells[2]")));
        assert!(p.iter().any(|m| m.starts_with("time.dt")));
        assert!(p.iter().any(|m| m.starts_with("drift.alpha")));
    }

    #[test]
    fn mode_and_fields_must_agree() {
        let text = CARTESIAN.replace("[drift]\nmach = 0.5", "[drift]\nmach = 0.5\nalpha = \"2\"").replace("cells", "cross_section = \"walled\"\ncells");
        let ConfigError::Invalid(p) = parse_str(&text).unwrap_err() else { panic!() };
        assert!(p.iter().any(|m| m.contains("drift.alpha")));
        assert!(p.iter().any(|m| m.contains("periodic")));
    }

    #[test]
    fn missing_mode_and_file() {
        assert!(parse_str("seed = 1").unwrap_err().to_string().contains("mode"));
        assert!(matches!(parse_config(Path::new("/nonexistent/x.toml")), Err(ConfigError::Io { .. })));
    }

    #[test]
    fn suggestions_need_small_distance() {
        assert_eq!(suggest("machh", ["mach", "field"]), Some("mach"));
        assert_eq!(suggest("alpah", ["alpha", "field"]), Some("alpha"));
        assert_eq!(suggest("banana", ["mach", "field"]), None);
    }
}
