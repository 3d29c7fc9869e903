//! Recomputation of the published uncertainty and moment tables.
//!
//! Cells are evaluated with a parallel map over distinct states; output order
//! is fixed by the table layout, so results do not depend on scheduling.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expectation::quadrature::QuadConfig;
use crate::expectation::{uncertainty, UncertaintyReport};
use crate::reference::{family_from_label, reference_values, Quantity, REFERENCE_TOLERANCE};
use crate::states::WaveState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    /// `dx dp` of REHO ground and first two excited states.
    UnRe,
    /// `dx dp` of isospectral ground states over `lambda`.
    UnIso,
    /// `dx dp` of Pursey and AM states.
    UnPam,
    /// `<x>`, `<x^2>` of isospectral ground states.
    AppendixA,
    /// `<x>`, `<x^2>` of the lowest Pursey and AM states.
    AppendixB,
}

impl TableId {
    pub const ALL: [TableId; 5] = [
        TableId::UnRe,
        TableId::UnIso,
        TableId::UnPam,
        TableId::AppendixA,
        TableId::AppendixB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::UnRe => "un-re",
            TableId::UnIso => "un-iso",
            TableId::UnPam => "un-pam",
            TableId::AppendixA => "appendix-a",
            TableId::AppendixB => "appendix-b",
        }
    }

    /// Tag of the published table the reference column comes from.
    pub fn source(self) -> &'static str {
        match self {
            TableId::UnRe => "table-5",
            TableId::UnIso => "table-6",
            TableId::UnPam => "table-7",
            TableId::AppendixA => "appendix-a",
            TableId::AppendixB => "appendix-b",
        }
    }

    fn quantities(self) -> &'static [Quantity] {
        match self {
            TableId::UnRe | TableId::UnIso | TableId::UnPam => &[Quantity::DxDp],
            TableId::AppendixA | TableId::AppendixB => &[Quantity::MeanX, Quantity::MeanX2],
        }
    }

    fn default_lambdas(self) -> &'static [f64] {
        match self {
            TableId::UnIso => &[1e-12, 1e-8, 1e-5, 1e-3, 1e-1, 1e2],
            TableId::AppendixA => &[1e-5, 1e-3, 1e-1, 1e2, 1e3],
            _ => &[],
        }
    }

    /// States in row-major order of the published layout.
    pub fn states(self, lambdas: Option<&[f64]>) -> Result<Vec<WaveState>> {
        let ms = [0i64, 2, 4];
        let lambdas = lambdas.unwrap_or(self.default_lambdas());
        let mut out = Vec::new();
        match self {
            TableId::UnRe => {
                for m in ms {
                    for n in -1..=1 {
                        out.push(WaveState::reho(m, n)?);
                    }
                }
            }
            TableId::UnIso | TableId::AppendixA => {
                for &l in lambdas {
                    for m in ms {
                        out.push(WaveState::isospectral(m, l, -1)?);
                    }
                }
            }
            TableId::UnPam => {
                for family in ["pursey", "am"] {
                    for m in ms {
                        for n in [0, 1, 2, 3, 10] {
                            out.push(WaveState::new(family_from_label(family, m, None)?, n)?);
                        }
                    }
                }
            }
            TableId::AppendixB => {
                for m in ms {
                    for family in ["pursey", "am"] {
                        out.push(WaveState::new(family_from_label(family, m, None)?, 0)?);
                    }
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown table '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    /// Within the reference tolerance.
    Pass,
    /// Published value disagrees with the computed one beyond tolerance.
    Flagged,
    /// No published value for this cell.
    Unreferenced,
}

impl CellStatus {
    pub fn name(self) -> &'static str {
        match self {
            CellStatus::Pass => "pass",
            CellStatus::Flagged => "flagged",
            CellStatus::Unreferenced => "unreferenced",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCell {
    pub table: TableId,
    pub source: &'static str,
    pub quantity: Quantity,
    pub state: WaveState,
    pub computed: f64,
    pub reference: Option<f64>,
    pub diff: Option<f64>,
    pub status: CellStatus,
}

fn pick(report: &UncertaintyReport, q: Quantity) -> f64 {
    match q {
        Quantity::DxDp => report.dx_dp,
        Quantity::MeanX => report.mean_x,
        Quantity::MeanX2 => report.mean_x2,
    }
}

/// Uncertainty reports for `states`, evaluated in parallel, returned in input order.
pub fn evaluate_states(states: &[WaveState], quad: Option<&QuadConfig>) -> Result<Vec<UncertaintyReport>> {
    states.par_iter().map(|s| uncertainty(s, quad)).collect()
}

fn cell(id: TableId, q: Quantity, state: WaveState, computed: f64) -> TableCell {
    let reference = reference_values().lookup(id.source(), q, &state).map(|r| r.value);
    let diff = reference.map(|r| computed - r);
    let status = match diff {
        None => CellStatus::Unreferenced,
        Some(d) if d.abs() <= REFERENCE_TOLERANCE => CellStatus::Pass,
        Some(_) => CellStatus::Flagged,
    };
    TableCell {
        table: id,
        source: id.source(),
        quantity: q,
        state,
        computed,
        reference,
        diff,
        status,
    }
}

/// Every cell of one table. `lambdas` replaces the default deformation
/// parameters of the isospectral tables.
pub fn build_table(id: TableId, lambdas: Option<&[f64]>, quad: Option<&QuadConfig>) -> Result<Vec<TableCell>> {
    Ok(build_tables(&[id], lambdas, quad)?.remove(0))
}

/// Several tables at once, sharing evaluations of states that appear in more
/// than one of them.
pub fn build_tables(ids: &[TableId], lambdas: Option<&[f64]>, quad: Option<&QuadConfig>) -> Result<Vec<Vec<TableCell>>> {
    let mut unique: Vec<WaveState> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for id in ids {
        for s in id.states(lambdas)? {
            index.entry(state_key(&s)).or_insert_with(|| {
                unique.push(s);
                unique.len() - 1
            });
        }
    }
    let reports = evaluate_states(&unique, quad)?;
    ids.iter()
        .map(|&id| {
            let states = id.states(lambdas)?;
            let mut cells = Vec::new();
            for &q in id.quantities() {
                for s in &states {
                    cells.push(cell(id, q, *s, pick(&reports[index[&state_key(s)]], q)));
                }
            }
            Ok(cells)
        })
        .collect()
}

fn state_key(s: &WaveState) -> String {
    format!(
        "{}:{}:{}:{}",
        s.spec.label(),
        s.spec.m(),
        s.spec.lambda().map_or(0, f64::to_bits),
        s.n
    )
}
