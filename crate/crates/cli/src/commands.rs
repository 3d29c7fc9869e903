use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use rayon::prelude::*;

use reho::potentials::check_lambda;
use reho::reference::family_from_label;
use reho::states::Eigenstate;
use reho::tables::{build_tables, evaluate_states, CellStatus, TableCell, TableId};
use reho::validation::{run_suite, GridSpec, SuiteOptions, ValidationRecord};
use reho::{Codimension, FamilySpec, QuadConfig, UncertaintyReport, WaveState};

use crate::output::{Cell, Format, Table};
use crate::{Cli, Command, Common, CurvesArgs, Family, Layout, Quantity, Sweep, TablesArgs, UncertaintyArgs, ValidateArgs, Which};

/// Environment variable overriding the quadrature relative tolerance.
pub const QUAD_TOL_ENV: &str = "REHO_QUAD_TOL";

/// Invalid command-line input detected after parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// 2 for invalid input, 1 for computational failure.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<reho::Error>() {
            return match e {
                reho::Error::NonConvergence { .. } => 1,
                _ => 2,
            };
        }
    }
    1
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let quad = quad_config(&cli.common)?;
    match &cli.command {
        Command::Tables(args) => tables(args, &cli.common, quad.as_ref()),
        Command::Curves(args) => curves(args, &cli.common, quad.as_ref()),
        Command::Uncertainty(args) => uncertainty(args, &cli.common, quad.as_ref()),
        Command::Validate(args) => validate(args, &cli.common, quad),
    }
}

/// Quadrature settings from flags and the environment; `None` keeps the
/// per-state defaults.
fn quad_config(c: &Common) -> Result<Option<QuadConfig>> {
    let env_tol = match std::env::var(QUAD_TOL_ENV) {
        Ok(s) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{QUAD_TOL_ENV}={s:?} is not a number")))?,
        ),
        Err(_) => None,
    };
    let rel_tol = c.rel_tol.or(env_tol);
    if c.half_width.is_none() && rel_tol.is_none() && c.abs_tol.is_none() && c.max_depth.is_none() {
        return Ok(None);
    }
    let d = QuadConfig::default();
    let cfg = QuadConfig {
        half_width: c.half_width.unwrap_or(d.half_width),
        rel_tol: rel_tol.unwrap_or(d.rel_tol),
        abs_tol: c.abs_tol.unwrap_or(d.abs_tol),
        max_depth: c.max_depth.unwrap_or(d.max_depth),
    };
    cfg.validate()?;
    Ok(Some(cfg))
}

fn grid_config(c: &Common) -> Result<Option<GridSpec>> {
    if c.grid_half_width.is_none() && c.grid_points.is_none() {
        return Ok(None);
    }
    let d = GridSpec::default();
    Ok(Some(GridSpec::new(
        c.grid_half_width.unwrap_or(d.half_width),
        c.grid_points.unwrap_or(d.points),
    )?))
}

fn emit(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn check_ms(ms: &[i64]) -> Result<()> {
    if ms.is_empty() {
        return Err(usage("at least one m is required"));
    }
    for &m in ms {
        Codimension::new(m)?;
    }
    Ok(())
}

fn check_lambdas(lambdas: &[f64]) -> Result<()> {
    for &l in lambdas {
        check_lambda(l)?;
    }
    Ok(())
}

fn label(f: Family) -> &'static str {
    match f {
        Family::Reho => "reho",
        Family::Partner => "partner",
        Family::Iso => "iso",
        Family::Pursey => "pursey",
        Family::Am => "am",
    }
}

/// Family members for every `m` (and every `lambda`, for the isospectral family).
fn family_specs(family: Family, ms: &[i64], lambdas: &[f64]) -> Result<Vec<FamilySpec>> {
    check_ms(ms)?;
    let mut out = Vec::new();
    for &m in ms {
        if family == Family::Iso {
            if lambdas.is_empty() {
                return Err(usage("the isospectral family needs --lambda"));
            }
            check_lambdas(lambdas)?;
            for &l in lambdas {
                out.push(FamilySpec::isospectral(m, l)?);
            }
        } else {
            out.push(family_from_label(label(family), m, None)?);
        }
    }
    Ok(out)
}

fn states_for(specs: &[FamilySpec], ns: &[i64]) -> Result<Vec<WaveState>> {
    let mut out = Vec::new();
    for spec in specs {
        if ns.is_empty() {
            out.push(WaveState::new(*spec, spec.lowest_index())?);
        }
        for &n in ns {
            out.push(WaveState::new(*spec, n)?);
        }
    }
    Ok(out)
}

fn table_ids(which: Which) -> Vec<TableId> {
    match which {
        Which::UnRe => vec![TableId::UnRe],
        Which::UnIso => vec![TableId::UnIso],
        Which::UnPam => vec![TableId::UnPam],
        Which::AppendixA => vec![TableId::AppendixA],
        Which::AppendixB => vec![TableId::AppendixB],
        Which::All => TableId::ALL.to_vec(),
    }
}

const TABLE_COLUMNS: [&str; 11] = [
    "table", "source", "quantity", "family", "m", "n", "lambda", "computed", "reference", "diff", "status",
];

fn table_rows(cells: &[TableCell]) -> Table {
    let mut t = Table::new(&TABLE_COLUMNS);
    for c in cells {
        t.push(vec![
            c.table.name().into(),
            c.source.into(),
            c.quantity.name().into(),
            c.state.spec.label().into(),
            c.state.spec.m().get().into(),
            c.state.n.into(),
            c.state.spec.lambda().into(),
            c.computed.into(),
            c.reference.into(),
            c.diff.into(),
            c.status.name().into(),
        ]);
    }
    t
}

fn tables(args: &TablesArgs, common: &Common, quad: Option<&QuadConfig>) -> Result<ExitCode> {
    if let Some(l) = &args.lambda {
        check_lambdas(l)?;
    }
    let ids = table_ids(args.which);
    let built = build_tables(&ids, args.lambda.as_deref(), quad)?;
    for (id, cells) in ids.iter().zip(&built) {
        let count = |s: CellStatus| cells.iter().filter(|c| c.status == s).count();
        eprintln!(
            "{}: {} cells, {} pass, {} flagged, {} unreferenced",
            id,
            cells.len(),
            count(CellStatus::Pass),
            count(CellStatus::Flagged),
            count(CellStatus::Unreferenced)
        );
    }
    match (&common.output, ids.len()) {
        (Some(dir), n) if n > 1 => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (id, cells) in ids.iter().zip(&built) {
                let path = dir.join(format!("{}.{}", id.name(), common.format.extension()));
                write_file(&path, &table_rows(cells).render(common.format))?;
            }
        }
        _ => {
            let mut all = Table::new(&TABLE_COLUMNS);
            for cells in &built {
                all.extend(table_rows(cells));
            }
            emit(common, &all.render(common.format))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

const REPORT_COLUMNS: [&str; 10] = [
    "quantity", "family", "m", "n", "lambda", "energy", "mean_x", "mean_x2", "mean_p2", "dx_dp",
];

fn report_rows(reports: &[UncertaintyReport]) -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in reports {
        t.push(vec![
            "dx_dp".into(),
            r.state.spec.label().into(),
            r.state.spec.m().get().into(),
            r.state.n.into(),
            r.state.spec.lambda().into(),
            r.state.energy().into(),
            r.mean_x.into(),
            r.mean_x2.into(),
            r.mean_p2.into(),
            r.dx_dp.into(),
        ]);
    }
    t
}

fn uncertainty(args: &UncertaintyArgs, common: &Common, quad: Option<&QuadConfig>) -> Result<ExitCode> {
    let specs = family_specs(args.family, &args.m, &args.lambda)?;
    let states = states_for(&specs, &args.n)?;
    let reports = evaluate_states(&states, quad)?;
    emit(common, &report_rows(&reports).render(common.format))?;
    Ok(ExitCode::SUCCESS)
}

fn x_grid(args: &CurvesArgs) -> Result<Vec<f64>> {
    let ok = args.x_min.is_finite() && args.x_max.is_finite() && args.x_step.is_finite();
    if !ok || args.x_max < args.x_min || args.x_step <= 0.0 {
        return Err(usage("x range needs x-min <= x-max and a positive x-step"));
    }
    let count = ((args.x_max - args.x_min) / args.x_step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| args.x_min + i as f64 * args.x_step).collect())
}

fn sweep_states(args: &CurvesArgs, sweep: Sweep) -> Result<Vec<WaveState>> {
    match sweep {
        Sweep::M => {
            if args.m_max < 0 {
                return Err(usage("--m-max must be non-negative"));
            }
            let ms: Vec<i64> = (0..=args.m_max).step_by(2).collect();
            states_for(&family_specs(args.family, &ms, &args.lambda)?, &args.n)
        }
        Sweep::N => {
            let specs = family_specs(args.family, &args.m, &args.lambda)?;
            let mut out = Vec::new();
            for spec in specs {
                for n in spec.lowest_index()..=args.n_max {
                    out.push(WaveState::new(spec, n)?);
                }
            }
            Ok(out)
        }
        Sweep::Lambda => {
            let (lo, hi) = (args.lambda_min, args.lambda_max);
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) || args.lambda_points < 2 {
                return Err(usage("lambda sweep needs 0 < lambda-min <= lambda-max and at least 2 points"));
            }
            let step = (hi / lo).ln() / (args.lambda_points - 1) as f64;
            let lambdas: Vec<f64> = (0..args.lambda_points)
                .map(|i| lo * (step * i as f64).exp())
                .collect();
            states_for(&family_specs(Family::Iso, &args.m, &lambdas)?, &args.n)
        }
    }
}

fn quantity_name(q: Quantity) -> &'static str {
    match q {
        Quantity::Potential => "potential",
        Quantity::Psi => "psi",
        Quantity::Density => "density",
    }
}

/// One curve: what to evaluate and for which family member.
struct Curve {
    spec: FamilySpec,
    n: Option<i64>,
    state: Option<Eigenstate>,
}

impl Curve {
    fn value(&self, q: Quantity, x: f64) -> f64 {
        match (q, &self.state) {
            (Quantity::Potential, _) | (_, None) => self.spec.potential(x),
            (Quantity::Psi, Some(es)) => es.value(x),
            (Quantity::Density, Some(es)) => es.value(x).powi(2),
        }
    }

    fn header(&self, q: Quantity) -> String {
        let mut s = format!("{}[{},m={}", quantity_name(q), self.spec.label(), self.spec.m());
        if let Some(n) = self.n {
            s.push_str(&format!(",n={n}"));
        }
        if let Some(l) = self.spec.lambda() {
            s.push_str(&format!(",lambda={l}"));
        }
        s.push(']');
        s
    }
}

fn curves(args: &CurvesArgs, common: &Common, quad: Option<&QuadConfig>) -> Result<ExitCode> {
    if let Some(sweep) = args.uncertainty_sweep {
        let states = sweep_states(args, sweep)?;
        let reports = evaluate_states(&states, quad)?;
        emit(common, &report_rows(&reports).render(common.format))?;
        return Ok(ExitCode::SUCCESS);
    }
    let xs = x_grid(args)?;
    let specs = family_specs(args.family, &args.m, &args.lambda)?;
    let curves: Vec<Curve> = match args.quantity {
        Quantity::Potential => specs
            .into_iter()
            .map(|spec| Curve {
                spec,
                n: None,
                state: None,
            })
            .collect(),
        Quantity::Psi | Quantity::Density => states_for(&specs, &args.n)?
            .into_iter()
            .map(|s| Curve {
                spec: s.spec,
                n: Some(s.n),
                state: Some(Eigenstate::closed_form(s)),
            })
            .collect(),
    };
    let q = args.quantity;
    let values: Vec<Vec<f64>> = curves
        .par_iter()
        .map(|c| xs.iter().map(|&x| c.value(q, x)).collect())
        .collect();
    let table = match args.layout {
        Layout::Long => {
            let mut t = Table::new(&["quantity", "family", "m", "n", "lambda", "x", "value"]);
            for (c, vals) in curves.iter().zip(&values) {
                for (&x, &v) in xs.iter().zip(vals) {
                    t.push(vec![
                        quantity_name(q).into(),
                        c.spec.label().into(),
                        c.spec.m().get().into(),
                        c.n.into(),
                        c.spec.lambda().into(),
                        x.into(),
                        v.into(),
                    ]);
                }
            }
            t
        }
        Layout::Wide => {
            let mut columns = vec!["x".to_string()];
            columns.extend(curves.iter().map(|c| c.header(q)));
            let mut t = Table::new(&columns);
            for (i, &x) in xs.iter().enumerate() {
                let mut row = vec![Cell::from(x)];
                row.extend(values.iter().map(|v| Cell::from(v[i])));
                t.push(row);
            }
            t
        }
    };
    emit(common, &table.render(common.format))?;
    Ok(ExitCode::SUCCESS)
}

fn validation_rows(records: &[ValidationRecord]) -> Table {
    let mut t = Table::new(&["family", "m", "lambda", "n", "check", "value", "tolerance", "pass"]);
    for r in records {
        t.push(vec![
            r.family.into(),
            r.m.into(),
            r.lambda.into(),
            r.n.into(),
            r.check.into(),
            r.value.into(),
            r.tolerance.into(),
            r.pass.into(),
        ]);
    }
    t
}

fn validate(args: &ValidateArgs, common: &Common, quad: Option<QuadConfig>) -> Result<ExitCode> {
    check_ms(&args.m)?;
    check_lambdas(&args.lambda)?;
    if args.levels == 0 || args.levels > 6 {
        return Err(usage("--levels must be between 1 and 6"));
    }
    let opts = SuiteOptions {
        ms: args.m.clone(),
        lambdas: args.lambda.clone(),
        levels: args.levels,
        grid: grid_config(common)?,
        quad,
    };
    let records = run_suite(&opts)?;
    let text = match common.format {
        Format::Json => validation_rows(&records).json_lines(),
        f => validation_rows(&records).render(f),
    };
    emit(common, &text)?;
    let failures: Vec<&ValidationRecord> = records.iter().filter(|r| !r.pass).collect();
    eprintln!("{} checks, {} failed", records.len(), failures.len());
    for f in &failures {
        eprintln!("FAIL {}", f.to_json_line());
    }
    Ok(if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
