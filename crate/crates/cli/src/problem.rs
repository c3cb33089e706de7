//! Problem files: the JSON input shared by every subcommand.

use rog_core::{ConeSpec, Constraint, Family, Sense, SymMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Largest accepted `|Aᵢⱼ − Aⱼᵢ|`, relative to `max(1, max |Aᵢⱼ|)`.
pub const MAX_ASYMMETRY: f64 = 1e-10;

/// Full square matrix as an array of rows.
pub type Rows = Vec<Vec<f64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(default)]
    pub sense: Sense,
    pub rows: Rows,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    /// Constraint matrices `Mᵢ` with `⟨Mᵢ, X⟩ ≥ 0` or `= 0`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<NamedMatrix>,
    /// Structured family, in place of `matrices`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    /// Cone member to decompose or round.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Rows>,
    /// QCQP objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0: Option<Rows>,
    /// QCQP slice matrix, `e₁e₁ᵀ` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    /// First generator of the witness subspace for three-dimensional joint ranges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned_w: Option<Vec<f64>>,
    /// `(y₁, y₂, t)` for hull-check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

impl ProblemFile {
    /// Parses and validates shapes and symmetry of every matrix.
    pub fn parse(text: &str) -> CliResult<Self> {
        let p: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n == 0 {
            return Err(CliError::Dimension("n must be positive".into()));
        }
        if !self.matrices.is_empty() && self.family.is_some() {
            return Err(CliError::Parse("give either matrices or family, not both".into()));
        }
        for (i, m) in self.matrices.iter().enumerate() {
            let what = if m.name.is_empty() {
                format!("matrices[{i}]")
            } else {
                m.name.clone()
            };
            self.matrix(&m.rows, &what)?;
        }
        for (rows, what) in [(&self.x, "x"), (&self.m0, "m0"), (&self.b, "b")] {
            if let Some(r) = rows {
                self.matrix(r, what)?;
            }
        }
        if let Some(w) = &self.pinned_w {
            if w.len() != self.n {
                return Err(CliError::Dimension(format!(
                    "pinned_w has length {}, expected {}",
                    w.len(),
                    self.n
                )));
            }
        }
        Ok(())
    }

    fn matrix(&self, rows: &Rows, what: &str) -> CliResult<SymMatrix> {
        let n = self.n;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(CliError::Dimension(format!("{what} is not {n} × {n}")));
        }
        let scale = rows.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        let asym = SymMatrix::max_asymmetry(rows);
        if !(asym <= MAX_ASYMMETRY * scale) {
            return Err(CliError::Parse(format!(
                "{what} is not symmetric (asymmetry {asym:.3e})"
            )));
        }
        Ok(SymMatrix::from_rows(rows)?)
    }

    fn required(&self, rows: &Option<Rows>, what: &str) -> CliResult<SymMatrix> {
        match rows {
            Some(r) => self.matrix(r, what),
            None => Err(CliError::Input(format!("problem file has no {what}"))),
        }
    }

    pub fn spec(&self) -> CliResult<ConeSpec> {
        if let Some(f) = &self.family {
            return Ok(ConeSpec::with_family(self.n, f.clone())?);
        }
        let cs = self
            .matrices
            .iter()
            .map(|m| {
                Ok(Constraint {
                    matrix: self.matrix(&m.rows, &m.name)?,
                    sense: m.sense,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Ok(ConeSpec::new(self.n, cs)?)
    }

    /// The two constraint matrices of a pair problem.
    pub fn pair(&self) -> CliResult<(SymMatrix, SymMatrix)> {
        match self.matrices.as_slice() {
            [a, b] if self.family.is_none() => Ok((self.matrix(&a.rows, &a.name)?, self.matrix(&b.rows, &b.name)?)),
            _ => Err(CliError::Input(
                "this command needs exactly two constraint matrices".into(),
            )),
        }
    }

    pub fn x(&self) -> CliResult<SymMatrix> {
        self.required(&self.x, "x")
    }

    pub fn m0(&self) -> CliResult<SymMatrix> {
        self.required(&self.m0, "m0")
    }

    pub fn b(&self) -> CliResult<Option<SymMatrix>> {
        self.b.as_ref().map(|r| self.matrix(r, "b")).transpose()
    }
}
