//! Named residuals with pass/fail flags.

use serde::{Deserialize, Serialize};

/// One checked identity: its worst residual over the samples and the tolerance it was held to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub axiom: String,
    #[serde(with = "finite_or_string")]
    pub residual: f64,
    pub samples: usize,
    #[serde(with = "finite_or_string")]
    pub tolerance: f64,
    pub pass: bool,
    /// Grid size the residual was computed on, when it depends on one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

impl ReportEntry {
    /// Passes iff the residual is finite and at most `tolerance`.
    pub fn new(axiom: impl Into<String>, residual: f64, samples: usize, tolerance: f64) -> Self {
        let pass = residual.is_finite() && residual <= tolerance;
        ReportEntry { axiom: axiom.into(), residual, samples, tolerance, pass, grid: None }
    }

    /// Passes iff the residual is finite and strictly above `threshold` (negative controls).
    pub fn above(axiom: impl Into<String>, residual: f64, samples: usize, threshold: f64) -> Self {
        let mut e = Self::new(axiom, residual, samples, threshold);
        e.pass = residual.is_finite() && residual > threshold;
        e
    }

    pub fn with_grid(mut self, g: usize) -> Self {
        self.grid = Some(g);
        self
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        if !prefix.is_empty() {
            self.axiom = format!("{prefix}.{}", self.axiom);
        }
        self
    }
}

/// Ordered collection of report entries plus provenance.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: String,
    pub grid: String,
    #[serde(default)]
    pub seed: Option<u64>,
    pub entries: Vec<ReportEntry>,
}

impl ValidationReport {
    pub fn new(model: impl Into<String>, grid: impl Into<String>) -> Self {
        ValidationReport { model: model.into(), grid: grid.into(), seed: None, entries: Vec::new() }
    }

    pub fn push(&mut self, e: ReportEntry) {
        self.entries.push(e);
    }

    pub fn extend(&mut self, es: impl IntoIterator<Item = ReportEntry>) {
        self.entries.extend(es);
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn get(&self, axiom: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.axiom == axiom)
    }
}

/// Finite floats as JSON numbers, non-finite ones as the strings "inf", "-inf", "nan".
mod finite_or_string {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("invalid residual `{other}`"))),
            },
        }
    }
}
