use std::fmt;

use serde::{Deserialize, Serialize};

use super::SetExpr;
use crate::num::{GaussRat, Tri};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DimLabel {
    Zero,
    Finite(usize),
    Infinite(String),
    WholeSpace,
}

impl fmt::Display for DimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DimLabel::Zero => write!(f, "0"),
            DimLabel::Finite(k) => write!(f, "{k}"),
            DimLabel::Infinite(tag) => write!(f, "∞ (≅ {tag})"),
            DimLabel::WholeSpace => write!(f, "whole space"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenRule {
    pub when: SetExpr,
    pub dim: DimLabel,
}

/// Eigenspace dimensions as an ordered rule list; the first matching rule fires
/// and the last rule matches every λ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EigenDim {
    pub rules: Vec<EigenRule>,
}

impl EigenDim {
    pub fn new(rules: Vec<(SetExpr, DimLabel)>) -> Self {
        EigenDim {
            rules: rules.into_iter().map(|(when, dim)| EigenRule { when, dim }).collect(),
        }
    }

    /// `None` when a membership test before the firing rule is undecided.
    pub fn at(&self, lambda: &GaussRat) -> Option<&DimLabel> {
        for r in &self.rules {
            match r.when.contains(lambda) {
                Tri::Yes => return Some(&r.dim),
                Tri::No => {}
                Tri::Unknown => return None,
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub version: u32,
    pub case: String,
    pub sigma: SetExpr,
    pub sigma_p: SetExpr,
    pub eigen: EigenDim,
    pub resolved: bool,
    pub open_problem: Option<String>,
    pub certified: bool,
    pub citations: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ClassificationReport {
    /// JSON with the `certified` flag removed, for comparing reports across
    /// conjugations that change exactness but not the leaf.
    pub fn comparable_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("certified");
        }
        v
    }
}

impl fmt::Display for ClassificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "case: {}", self.case)?;
        writeln!(f, "sigma_p: {}", self.sigma_p)?;
        writeln!(f, "sigma: {}", self.sigma)?;
        for r in &self.eigen.rules {
            writeln!(f, "  dim ker(C - λ) = {} for λ in {}", r.dim, r.when)?;
        }
        writeln!(f, "resolved: {}", self.resolved)?;
        if let Some(p) = &self.open_problem {
            writeln!(f, "open problem: {p}")?;
        }
        writeln!(f, "certified: {}", self.certified)?;
        writeln!(f, "citations: {}", self.citations.join(", "))?;
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
