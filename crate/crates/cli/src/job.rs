//! Job files: one JSON object per run.
//!
//! ```json
//! {"mode": "wick-star", "dim": 1, "trunc": 4,
//!  "inputs": {"f": [{"I": [1], "re": "1"}], "g": [{"I": [0], "J": [1], "re": "1"}]}}
//! ```
//!
//! Series use the record literal format of the core crate; rationals are
//! always `"p/q"` strings.

use serde::Deserialize;
use wickquant::cp1::RationalSymbol;
use wickquant::scalar::parse_rational;
use wickquant::{Coefficient, TermRecord};

use crate::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    WickStar,
    BtEval,
    KNormalize,
    RepAct,
    Cp1Verify,
    Suite,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ContextKind {
    Flat,
    #[default]
    FubiniStudy,
    Potential,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub mode: Mode,
    #[serde(default = "one")]
    pub dim: usize,
    pub trunc: Option<i32>,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub outputs: Outputs,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub f: Option<Vec<TermRecord>>,
    pub g: Option<Vec<TermRecord>>,
    pub alpha: Option<Vec<TermRecord>>,
    pub potential: Option<Vec<TermRecord>>,
    pub context: Option<ContextKind>,
    pub symbol: Option<SymbolSpec>,
    pub p_max: Option<u32>,
    pub order: Option<i32>,
    pub single_pq_max: Option<u32>,
    pub single_order: Option<i32>,
    pub ms: Option<Vec<u32>>,
    pub decay_orders: Option<Vec<i32>>,
    pub pairs: Option<Vec<(u32, u32)>>,
    pub mobius_w: Option<ComplexLiteral>,
    pub checks: Option<Vec<String>>,
    pub cases: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Report file name inside `--out`; defaults to `report.txt`.
    pub report: Option<String>,
    /// CSV file stem inside `--out`; defaults to `residuals`.
    pub csv: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexLiteral {
    pub re: String,
    #[serde(default = "zero")]
    pub im: String,
}

fn zero() -> String {
    "0".into()
}

impl ComplexLiteral {
    pub fn parse(&self) -> Result<Coefficient, CliError> {
        Ok(Coefficient::new(
            parse_rational(&self.re)?,
            parse_rational(&self.im)?,
        ))
    }
}

/// `Σ c_{ab} z^a z̄^b / (1+|z|²)^d`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSpec {
    pub d: u32,
    pub terms: Vec<SymbolTerm>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTerm {
    pub a: u32,
    pub b: u32,
    pub re: String,
    #[serde(default = "zero")]
    pub im: String,
}

impl SymbolSpec {
    pub fn build(&self) -> Result<RationalSymbol, CliError> {
        let mut terms = Vec::new();
        for t in &self.terms {
            let c = ComplexLiteral {
                re: t.re.clone(),
                im: t.im.clone(),
            }
            .parse()?;
            terms.push(((t.a, t.b), c));
        }
        Ok(RationalSymbol::new(terms, self.d)?)
    }
}

impl JobSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::Parse("job file is empty".into()));
        }
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn require_trunc(&self) -> Result<i32, CliError> {
        self.trunc.ok_or_else(|| {
            CliError::Parse(format!("field `trunc` is required for {:?}", self.mode))
        })
    }

    pub fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| {
            CliError::Parse(format!(
                "field `inputs.{name}` is required for {:?}",
                self.mode
            ))
        })
    }
}
