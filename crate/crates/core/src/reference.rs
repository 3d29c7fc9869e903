//! Published uncertainty and moment values, loaded from
//! `data/reference_values.toml`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potentials::FamilySpec;
use crate::states::WaveState;

/// Absolute tolerance for agreement with a published value.
pub const REFERENCE_TOLERANCE: f64 = 2e-3;

const DATA: &str = include_str!("../data/reference_values.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    DxDp,
    MeanX,
    MeanX2,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::DxDp => "dx_dp",
            Quantity::MeanX => "mean_x",
            Quantity::MeanX2 => "mean_x2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceValue {
    pub source: String,
    pub quantity: Quantity,
    pub family: String,
    pub m: i64,
    pub n: i64,
    pub lambda: Option<f64>,
    pub value: f64,
}

impl ReferenceValue {
    pub fn spec(&self) -> Result<FamilySpec> {
        family_from_label(&self.family, self.m, self.lambda)
    }

    pub fn state(&self) -> Result<WaveState> {
        WaveState::new(self.spec()?, self.n)
    }
}

/// Builds a family from its short label (`reho`, `partner`, `iso`, `pursey`, `am`).
pub fn family_from_label(label: &str, m: i64, lambda: Option<f64>) -> Result<FamilySpec> {
    match (label, lambda) {
        ("reho", _) => FamilySpec::reho(m),
        ("partner", _) => FamilySpec::partner(m),
        ("pursey", _) => FamilySpec::pursey(m),
        ("am", _) => FamilySpec::abraham_moses(m),
        ("iso", Some(l)) => FamilySpec::isospectral(m, l),
        ("iso", None) => Err(Error::InvalidConfig("isospectral family needs lambda".into())),
        (other, _) => Err(Error::InvalidConfig(format!("unknown family '{other}'"))),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSet {
    pub version: u32,
    #[serde(rename = "entry")]
    pub entries: Vec<ReferenceValue>,
}

impl ReferenceSet {
    pub fn parse(text: &str) -> Result<ReferenceSet> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("reference data: {e}")))
    }

    pub fn by_source<'a>(&'a self, source: &'a str) -> impl Iterator<Item = &'a ReferenceValue> + 'a {
        self.entries.iter().filter(move |e| e.source == source)
    }

    /// The entry for a given quantity and state, if one was published.
    pub fn lookup<'a>(&'a self, source: &'a str, quantity: Quantity, state: &WaveState) -> Option<&'a ReferenceValue> {
        self.by_source(source).find(|e| {
            e.quantity == quantity && e.n == state.n && e.spec().is_ok_and(|spec| spec == state.spec)
        })
    }
}

/// The embedded data set.
pub fn reference_values() -> &'static ReferenceSet {
    static SET: OnceLock<ReferenceSet> = OnceLock::new();
    SET.get_or_init(|| ReferenceSet::parse(DATA).expect("embedded reference data is valid"))
}
