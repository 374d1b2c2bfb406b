//! JSON input documents.

use serde::{Deserialize, Serialize};

use crate::hypotheses::PresentationInput;
use crate::polymatrix::{PolyMatrix, QMatrix};
use crate::polyring::{Coeff, MonomialOrder, VarSet};
use crate::rees::t_names;

use super::fixtures::Assertion;
use super::CliError;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RingSpec {
    pub vars: Vec<String>,
}

/// A rational written as an integer or a `"p/q"` string.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum RationalText {
    Int(i64),
    Text(String),
}

impl RationalText {
    pub fn parse(&self) -> Result<Coeff, CliError> {
        match self {
            RationalText::Int(v) => Ok(Coeff::from_integer((*v).into())),
            RationalText::Text(s) => {
                let s = s.trim();
                let bad = || CliError::Parse(format!("invalid rational {s:?}"));
                match s.split_once('/') {
                    Some((p, q)) => {
                        let p = p.trim().parse().map_err(|_| bad())?;
                        let q: num_bigint::BigInt = q.trim().parse().map_err(|_| bad())?;
                        if q == 0.into() {
                            return Err(bad());
                        }
                        Ok(Coeff::new(p, q))
                    }
                    None => Ok(Coeff::from_integer(s.parse().map_err(|_| bad())?)),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Options {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tiers: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct InputDocument {
    pub ring: RingSpec,
    pub matrix: Vec<Vec<String>>,
    pub rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate_change: Option<Vec<Vec<RationalText>>>,
    #[serde(default)]
    pub options: Options,
    /// Expected outcomes, used by the fixture runner.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expect: Vec<Assertion>,
}

impl InputDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: InputDocument = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.ring.vars.len() < 3 {
            return Err(CliError::Parse("the ring needs at least 3 variables".into()));
        }
        let reserved = t_names(self.matrix.len());
        if let Some(v) = self.ring.vars.iter().find(|v| reserved.contains(v) || is_t_name(v)) {
            return Err(CliError::Parse(format!("variable name {v} is reserved for Rees variables")));
        }
        if self.rank == 0 {
            return Err(CliError::Parse("rank must be at least 1".into()));
        }
        let cols = self.matrix.first().map_or(0, Vec::len);
        if self.matrix.is_empty() || self.matrix.iter().any(|r| r.len() != cols) {
            return Err(CliError::Parse("matrix must be nonempty and rectangular".into()));
        }
        Ok(())
    }

    pub fn presentation(&self) -> Result<PresentationInput, CliError> {
        let ring = VarSet::new(self.ring.vars.clone()).map_err(|e| CliError::Parse(e.to_string()))?;
        let m = PolyMatrix::parse(&ring, &self.matrix).map_err(|e| CliError::Parse(e.to_string()))?;
        PresentationInput::new(m, self.rank).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn coordinate_change(&self) -> Result<Option<QMatrix>, CliError> {
        self.coordinate_change
            .as_ref()
            .map(|rows| rows.iter().map(|r| r.iter().map(RationalText::parse).collect()).collect())
            .transpose()
    }

    pub fn order(&self) -> Result<Option<MonomialOrder>, CliError> {
        self.options
            .order
            .as_deref()
            .map(|o| o.parse().map_err(|_| CliError::Parse(format!("unknown order {o:?}"))))
            .transpose()
    }
}

fn is_t_name(v: &str) -> bool {
    v.len() > 1 && v.starts_with('T') && v[1..].bytes().all(|b| b.is_ascii_digit()) && !v[1..].starts_with('0')
}
