//! Model documents: TOML files describing one or two chiral sides, an optional left-right
//! function, grids, tolerances and the suites to run.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub schema: u32,
    pub name: String,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub fock: FockSection,
    #[serde(default)]
    pub locality: LocalitySection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub seed: Option<u64>,
    pub side: Vec<SideSection>,
    #[serde(default)]
    pub lr: Option<LrSection>,
    #[serde(default)]
    pub output: OutputSection,
}

fn default_suites() -> Vec<Suite> {
    vec![Suite::All]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Ll,
    Lr,
    Fock,
    Locality,
    Massive,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 5] = [Suite::Ll, Suite::Lr, Suite::Fock, Suite::Locality, Suite::Massive];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Ll => "ll",
            Suite::Lr => "lr",
            Suite::Fock => "fock",
            Suite::Locality => "locality",
            Suite::Massive => "massive",
            Suite::All => "all",
        }
    }
}

/// Gauss–Legendre grid used by the axiom suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_nodes")]
    pub nodes: usize,
    #[serde(default = "default_qmax")]
    pub qmax: f64,
}

fn default_nodes() -> usize {
    32
}

fn default_qmax() -> f64 {
    6.0
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { nodes: default_nodes(), qmax: default_qmax() }
    }
}

/// Per-side override of the axiom-suite grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverride {
    pub nodes: Option<usize>,
    pub qmax: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSection {
    /// Nodes of the (small) grid the Fock-space checks run on.
    #[serde(default = "default_fock_nodes")]
    pub nodes: usize,
    #[serde(default = "default_nmax")]
    pub nmax: usize,
    /// Random symmetric vectors for the particle-bound audit.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn default_fock_nodes() -> usize {
    4
}

fn default_nmax() -> usize {
    3
}

fn default_trials() -> usize {
    100
}

impl Default for FockSection {
    fn default() -> Self {
        FockSection { nodes: default_fock_nodes(), nmax: default_nmax(), trials: default_trials() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalitySection {
    /// Nodes of the composite locality grid (a multiple of 8).
    #[serde(default = "default_locality_nodes")]
    pub nodes: usize,
    /// Nodes of the grid for the twist/projector commutators.
    #[serde(default = "default_fock_nodes")]
    pub twist_nodes: usize,
}

fn default_locality_nodes() -> usize {
    64
}

impl Default for LocalitySection {
    fn default() -> Self {
        LocalitySection { nodes: default_locality_nodes(), twist_nodes: default_fock_nodes() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    #[serde(default = "default_algebraic")]
    pub algebraic: f64,
    #[serde(default = "default_quadrature")]
    pub quadrature: f64,
    #[serde(default = "default_interior")]
    pub interior_bound: f64,
    #[serde(default = "default_commutator")]
    pub commutator: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_algebraic() -> f64 {
    1e-10
}

fn default_quadrature() -> f64 {
    1e-8
}

fn default_interior() -> f64 {
    1e6
}

fn default_commutator() -> f64 {
    1e-5
}

fn default_slack() -> f64 {
    1e-12
}

impl Default for ToleranceSection {
    fn default() -> Self {
        ToleranceSection {
            algebraic: default_algebraic(),
            quadrature: default_quadrature(),
            interior_bound: default_interior(),
            commutator: default_commutator(),
            slack: default_slack(),
        }
    }
}

/// One chiral half. The first side listed is the left (+) one, the second the right (−) one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideSection {
    pub name: String,
    pub builder: String,
    pub d: Option<usize>,
    pub bar: Option<Vec<usize>>,
    pub blocks: Option<Vec<f64>>,
    pub sign: Option<i32>,
    pub masses: Option<Vec<f64>>,
    pub grid: Option<GridOverride>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LrSection {
    pub builder: String,
    pub blocks: Option<Vec<f64>>,
    pub sign: Option<i32>,
    /// Constant phase (radians) multiplying a scalar left-right function.
    pub phase: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub report: Option<String>,
    pub csv: Option<String>,
}

pub const LL_BUILDERS: [&str; 4] = ["constant_identity", "minus_one", "sinh", "tensor_square"];
pub const LR_BUILDERS: [&str; 3] = ["identity", "flip", "sinh"];

pub fn parse_model(path: &Path) -> Result<ModelDocument, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), source: e })?;
    parse_model_str(&text).map_err(|e| match e {
        CliError::Syntax { message, .. } => CliError::Syntax { path: path.display().to_string(), message },
        other => other,
    })
}

/// Parses and validates a document; syntax errors carry the line and column from the TOML parser.
pub fn parse_model_str(text: &str) -> Result<ModelDocument, CliError> {
    let doc: ModelDocument =
        toml::from_str(text).map_err(|e| CliError::Syntax { path: "<input>".into(), message: e.to_string() })?;
    doc.validate()?;
    Ok(doc)
}

fn schema(field: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Schema { field: field.into(), reason: reason.into() }
}

fn check_blocks(path: &str, blocks: &[f64]) -> Result<(), CliError> {
    if blocks.is_empty() {
        return Err(schema(path, "needs at least one block"));
    }
    for (k, &b) in blocks.iter().enumerate() {
        if !(b > 0.0 && b < std::f64::consts::PI) {
            return Err(CliError::Range { field: format!("{path}[{k}]"), reason: format!("b = {b} must lie in (0, pi)") });
        }
    }
    Ok(())
}

fn check_sign(path: &str, sign: Option<i32>) -> Result<(), CliError> {
    match sign {
        None | Some(1) | Some(-1) => Ok(()),
        Some(s) => Err(CliError::Range { field: path.into(), reason: format!("{s} is not +1 or -1") }),
    }
}

fn forbid<T>(path: &str, value: &Option<T>, builder: &str) -> Result<(), CliError> {
    match value {
        Some(_) => Err(schema(path, format!("not a parameter of builder `{builder}`"))),
        None => Ok(()),
    }
}

impl ModelDocument {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema != SCHEMA_VERSION {
            return Err(schema("schema", format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema)));
        }
        if self.name.trim().is_empty() {
            return Err(schema("name", "must not be empty"));
        }
        if self.side.is_empty() || self.side.len() > 2 {
            return Err(schema("side", format!("{} sides given, expected one or two", self.side.len())));
        }
        if self.suites.is_empty() {
            return Err(schema("suites", "must select at least one suite"));
        }
        if self.grid.nodes == 0 {
            return Err(CliError::Range { field: "grid.nodes".into(), reason: "must be positive".into() });
        }
        if !(self.grid.qmax > 0.0 && self.grid.qmax.is_finite()) {
            return Err(CliError::Range { field: "grid.qmax".into(), reason: format!("{} is not positive", self.grid.qmax) });
        }
        if self.fock.nodes == 0 {
            return Err(CliError::Range { field: "fock.nodes".into(), reason: "must be positive".into() });
        }
        if self.locality.twist_nodes == 0 {
            return Err(CliError::Range { field: "locality.twist_nodes".into(), reason: "must be positive".into() });
        }
        if self.locality.nodes == 0 || self.locality.nodes % 8 != 0 {
            return Err(CliError::Range {
                field: "locality.nodes".into(),
                reason: format!("{} is not a positive multiple of 8", self.locality.nodes),
            });
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("algebraic", t.algebraic),
            ("quadrature", t.quadrature),
            ("interior_bound", t.interior_bound),
            ("commutator", t.commutator),
            ("slack", t.slack),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Range { field: format!("tolerances.{name}"), reason: format!("{v} is not a finite non-negative number") });
            }
        }
        for (i, s) in self.side.iter().enumerate() {
            if self.side[..i].iter().any(|o| o.name == s.name) {
                return Err(schema(format!("side[{i}].name"), format!("duplicate side name `{}`", s.name)));
            }
            validate_side(i, s)?;
        }
        if let Some(lr) = &self.lr {
            if self.side.len() != 2 {
                return Err(schema("lr", "a left-right function needs two sides"));
            }
            validate_lr(lr, &self.side)?;
        }
        Ok(())
    }

    /// Multiplicity of side `i` after defaults.
    pub fn side_dim(&self, i: usize) -> usize {
        side_dim(&self.side[i])
    }
}

pub(crate) fn side_dim(s: &SideSection) -> usize {
    match (s.d, &s.bar) {
        (Some(d), _) => d,
        (None, Some(bar)) => bar.len(),
        (None, None) => match s.builder.as_str() {
            "tensor_square" => 2,
            _ => 1,
        },
    }
}

fn validate_side(i: usize, s: &SideSection) -> Result<(), CliError> {
    let p = |f: &str| format!("side[{i}].{f}");
    if s.name.is_empty() || !s.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(schema(p("name"), format!("`{}` is not a non-empty name of letters, digits, `_` or `-`", s.name)));
    }
    let d = side_dim(s);
    if d == 0 {
        return Err(CliError::Range { field: p("d"), reason: "must be at least 1".into() });
    }
    if let Some(bar) = &s.bar {
        if bar.len() != d {
            return Err(schema(p("bar"), format!("{} entries for d = {d}", bar.len())));
        }
        for (a, &b) in bar.iter().enumerate() {
            if b >= d || bar[b] != a {
                return Err(schema(p("bar"), format!("not an involution of 0..{d} at index {a}")));
            }
        }
    }
    match s.builder.as_str() {
        "constant_identity" => {
            forbid(&p("blocks"), &s.blocks, &s.builder)?;
            forbid(&p("sign"), &s.sign, &s.builder)?;
        }
        "minus_one" => {
            forbid(&p("blocks"), &s.blocks, &s.builder)?;
            forbid(&p("sign"), &s.sign, &s.builder)?;
            if d != 1 {
                return Err(schema(p("d"), "builder `minus_one` is scalar (d = 1)"));
            }
        }
        "sinh" => {
            let blocks = s.blocks.as_ref().ok_or_else(|| schema(p("blocks"), "required by builder `sinh`"))?;
            check_blocks(&p("blocks"), blocks)?;
            check_sign(&p("sign"), s.sign)?;
            if d != 1 {
                return Err(schema(p("d"), "builder `sinh` is scalar (d = 1)"));
            }
        }
        "tensor_square" => {
            let blocks = s.blocks.as_ref().ok_or_else(|| schema(p("blocks"), "required by builder `tensor_square`"))?;
            check_blocks(&p("blocks"), blocks)?;
            check_sign(&p("sign"), s.sign)?;
        }
        other => {
            return Err(CliError::UnknownBuilder { field: p("builder"), name: other.into(), known: LL_BUILDERS.join(", ") })
        }
    }
    if let Some(m) = &s.masses {
        if m.len() != d {
            return Err(schema(p("masses"), format!("{} masses for d = {d}", m.len())));
        }
        for (a, &x) in m.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(CliError::Range { field: format!("{}[{a}]", p("masses")), reason: format!("{x} is not a positive mass") });
            }
        }
    }
    if let Some(g) = &s.grid {
        if g.nodes == Some(0) {
            return Err(CliError::Range { field: p("grid.nodes"), reason: "must be positive".into() });
        }
        if let Some(q) = g.qmax {
            if !(q > 0.0 && q.is_finite()) {
                return Err(CliError::Range { field: p("grid.qmax"), reason: format!("{q} is not positive") });
            }
        }
    }
    Ok(())
}

fn validate_lr(lr: &LrSection, sides: &[SideSection]) -> Result<(), CliError> {
    let (dl, dr) = (side_dim(&sides[0]), side_dim(&sides[1]));
    match lr.builder.as_str() {
        "identity" => {
            forbid("lr.blocks", &lr.blocks, &lr.builder)?;
            forbid("lr.sign", &lr.sign, &lr.builder)?;
            forbid("lr.phase", &lr.phase, &lr.builder)?;
        }
        "flip" => {
            forbid("lr.blocks", &lr.blocks, &lr.builder)?;
            forbid("lr.sign", &lr.sign, &lr.builder)?;
            forbid("lr.phase", &lr.phase, &lr.builder)?;
            if dl != dr {
                return Err(schema("lr.builder", "the flip construction needs equal multiplicities on both sides"));
            }
        }
        "sinh" => {
            let blocks = lr.blocks.as_ref().ok_or_else(|| schema("lr.blocks", "required by builder `sinh`"))?;
            check_blocks("lr.blocks", blocks)?;
            check_sign("lr.sign", lr.sign)?;
            if let Some(ph) = lr.phase {
                if !ph.is_finite() {
                    return Err(CliError::Range { field: "lr.phase".into(), reason: "must be finite".into() });
                }
            }
            if dl != 1 || dr != 1 {
                return Err(schema("lr.builder", "builder `sinh` needs d = 1 on both sides"));
            }
        }
        other => {
            return Err(CliError::UnknownBuilder { field: "lr.builder".into(), name: other.into(), known: LR_BUILDERS.join(", ") })
        }
    }
    Ok(())
}

