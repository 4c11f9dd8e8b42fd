//! Mode handlers. Each returns a [`Report`]; nothing here touches the
//! filesystem.

use rayon::prelude::*;
use wickquant::bt::{bt_star_eval, rep_act, BTContext};
use wickquant::cp1::{mobius_pullback, FitOutcome, RationalSymbol, ResidualFit};
use wickquant::jets::{curvature, k_normalize, PotentialJets};
use wickquant::suite;
use wickquant::verify::{
    composition_decay, decay_ok, peak_identity, residual_csv, single_operator, working_trunc,
};
use wickquant::wick::wick_star;
use wickquant::{FockSeries, FunctionJets, WickSeries};

use crate::job::{ContextKind, JobSpec, Mode};
use crate::CliError;

pub const SLOPE_SLACK: f64 = 0.3;
pub const DEFAULT_MS: [u32; 5] = [32, 64, 128, 256, 512];

/// Run-wide settings from the command line.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub trunc_ceiling: i32,
    pub seed: u64,
}

/// Text lines, optional CSV tables keyed by a file suffix, and whether
/// every verified property held.
#[derive(Debug, Default)]
pub struct Report {
    pub lines: Vec<String>,
    pub tables: Vec<(String, Vec<[String; 7]>)>,
    pub failed: Vec<String>,
}

impl Report {
    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out
    }
}

fn check_ceiling(trunc: i32, settings: &Settings) -> Result<(), CliError> {
    if trunc > settings.trunc_ceiling {
        return Err(CliError::Parse(format!(
            "truncation {trunc} exceeds the ceiling {} (see --trunc-ceiling)",
            settings.trunc_ceiling
        )));
    }
    if trunc < 0 {
        return Err(CliError::Parse(format!("truncation {trunc} is negative")));
    }
    Ok(())
}

pub fn run(job: &JobSpec, settings: &Settings) -> Result<Report, CliError> {
    if job.dim == 0 {
        return Err(CliError::Parse("field `dim` must be at least 1".into()));
    }
    let mut report = Report::default();
    report.line(format!("mode: {}", mode_name(job.mode)));
    match job.mode {
        Mode::WickStar => wick_star_mode(job, settings, &mut report)?,
        Mode::BtEval => bt_eval_mode(job, settings, &mut report)?,
        Mode::KNormalize => k_normalize_mode(job, settings, &mut report)?,
        Mode::RepAct => rep_act_mode(job, settings, &mut report)?,
        Mode::Cp1Verify => cp1_verify_mode(job, settings, &mut report)?,
        Mode::Suite => suite_mode(job, settings, &mut report)?,
    }
    Ok(report)
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::WickStar => "wick-star",
        Mode::BtEval => "bt-eval",
        Mode::KNormalize => "k-normalize",
        Mode::RepAct => "rep-act",
        Mode::Cp1Verify => "cp1-verify",
        Mode::Suite => "suite",
    }
}

fn wick_star_mode(job: &JobSpec, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let trunc = job.require_trunc()?;
    check_ceiling(trunc, settings)?;
    let f = WickSeries::from_records(job.dim, trunc, 0, job.require(&job.inputs.f, "f")?)?;
    let g = WickSeries::from_records(job.dim, trunc, 0, job.require(&job.inputs.g, "g")?)?;
    let p = wick_star(&f, &g)?;
    report.line(format!("dim: {}  trunc: {trunc}", job.dim));
    report.line(format!("f = {f}"));
    report.line(format!("g = {g}"));
    report.line(format!("f ⋆ g = {p}"));
    report.line(format!("literal: {}", p.to_literal()));
    Ok(())
}

fn context(job: &JobSpec, trunc: i32) -> Result<BTContext, CliError> {
    match job.inputs.context.unwrap_or_default() {
        ContextKind::Flat => Ok(BTContext::flat(job.dim, trunc)),
        ContextKind::FubiniStudy => {
            if job.dim != 1 {
                return Err(CliError::Parse(
                    "the fubini-study context is one-dimensional; use `potential`".into(),
                ));
            }
            Ok(BTContext::fubini_study(trunc))
        }
        ContextKind::Potential => {
            let raw = PotentialJets::from_records(
                job.dim,
                trunc.max(2) as u32,
                job.require(&job.inputs.potential, "potential")?,
            )?;
            let norm = k_normalize(&raw)?;
            Ok(BTContext::from_potential(&norm.jets, trunc)?)
        }
    }
}

fn jets(
    job: &JobSpec,
    trunc: i32,
    records: &Option<Vec<wickquant::TermRecord>>,
    name: &str,
) -> Result<FunctionJets, CliError> {
    Ok(FunctionJets::from_records(
        job.dim,
        trunc as u32,
        job.require(records, name)?,
    )?)
}

fn bt_eval_mode(job: &JobSpec, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let trunc = job.require_trunc()?;
    check_ceiling(trunc, settings)?;
    let ctx = context(job, trunc)?;
    let f = jets(job, trunc, &job.inputs.f, "f")?;
    let g = jets(job, trunc, &job.inputs.g, "g")?;
    let value = bt_star_eval(&f, &g, &ctx)?;
    report.line(format!(
        "dim: {}  trunc: {trunc}  reliable through degree {}",
        job.dim,
        ctx.geometric_degree()
    ));
    report.line(format!("(f ⋆ g)(z0) = {value}"));
    for k in 0..=trunc / 2 {
        report.line(format!("C_{k} = {}", value.coeff(k)));
    }
    Ok(())
}

fn k_normalize_mode(
    job: &JobSpec,
    settings: &Settings,
    report: &mut Report,
) -> Result<(), CliError> {
    let trunc = job.require_trunc()?;
    check_ceiling(trunc, settings)?;
    let raw = PotentialJets::from_records(
        job.dim,
        trunc.max(0) as u32,
        job.require(&job.inputs.potential, "potential")?,
    )?;
    let norm = k_normalize(&raw)?;
    report.line(format!("dim: {}  order: {trunc}", job.dim));
    report.line(format!("varphi = {}", norm.jets.varphi()));
    for (i, z) in norm.coord_change.iter().enumerate() {
        report.line(format!("z{} = {z}", i + 1));
    }
    report.line(format!("frame = {}", norm.frame_change));
    if let Some(psi) = norm.jets.psi() {
        report.line(format!("psi = {psi}"));
    }
    if trunc >= 4 {
        let r = curvature(&norm.jets)?;
        for ((i, j, k, l), c) in &r.entries {
            report.line(format!("R[{i}{j}{k}{l}] = {c}"));
        }
    }
    report.line(format!("literal: {}", norm.jets.varphi().to_literal()));
    Ok(())
}

fn rep_act_mode(job: &JobSpec, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let trunc = job.require_trunc()?;
    check_ceiling(trunc, settings)?;
    let ctx = context(job, trunc)?;
    let f = jets(job, trunc, &job.inputs.f, "f")?;
    let alpha = FockSeries::from_records(job.dim, trunc, job.require(&job.inputs.alpha, "alpha")?)?;
    let out = rep_act(&f, &alpha, &ctx)?;
    report.line(format!("dim: {}  trunc: {trunc}", job.dim));
    report.line(format!("alpha = {alpha}"));
    report.line(format!("T_f(alpha) = {out}"));
    report.line(format!("literal: {}", out.as_wick().to_literal()));
    Ok(())
}

fn cp1_verify_mode(
    job: &JobSpec,
    settings: &Settings,
    report: &mut Report,
) -> Result<(), CliError> {
    let inputs = &job.inputs;
    let p_max = inputs.p_max.unwrap_or(3);
    let order = inputs.order.unwrap_or(4);
    let single_pq = inputs.single_pq_max.unwrap_or(2);
    let single_order = inputs.single_order.unwrap_or(3);
    let ms = inputs.ms.clone().unwrap_or_else(|| DEFAULT_MS.to_vec());
    let decay_orders = inputs.decay_orders.clone().unwrap_or_else(|| vec![0, 1, 2]);
    let mut symbol = match &inputs.symbol {
        Some(s) => s.build()?,
        None => RationalSymbol::t_over_one_plus_t(),
    };
    if let Some(w) = &inputs.mobius_w {
        symbol = mobius_pullback(&symbol, &w.parse()?);
    }
    if ms.contains(&0) {
        return Err(CliError::Parse(
            "`inputs.ms` entries must be positive".into(),
        ));
    }
    let max_decay = decay_orders.iter().copied().max().unwrap_or(0);
    for t in [
        working_trunc(order),
        working_trunc(single_order),
        working_trunc(max_decay + 1),
    ] {
        check_ceiling(t, settings)?;
    }
    let pairs = inputs
        .pairs
        .clone()
        .unwrap_or_else(|| (0..=2).map(|p| (p, p)).collect());

    report.line(format!("symbol: {symbol}"));
    for c in peak_identity(p_max, order)? {
        if !c.matches() {
            report.failed.push(c.report_line());
        }
        report.line(c.report_line());
    }
    for c in single_operator(&symbol, single_pq, single_order)? {
        if !c.matches() {
            report.failed.push(c.report_line());
        }
        report.line(c.report_line());
    }
    let fits: Vec<(i32, Vec<ResidualFit>)> = decay_orders
        .par_iter()
        .map(|&n| composition_decay(&symbol, &symbol, &pairs, &ms, n).map(|f| (n, f)))
        .collect::<Result<_, _>>()?;
    for (n, fits) in &fits {
        for fit in fits {
            let bound = -(*n as f64 + 1.0) + SLOPE_SLACK;
            let ok = decay_ok(&fit.fit, *n, SLOPE_SLACK);
            let line = match fit.fit {
                FitOutcome::Exact => format!("DECAY EXACT N={n} p={} q={}", fit.p, fit.q),
                FitOutcome::Slope(s) => format!(
                    "DECAY {} N={n} p={} q={}: slope {s:.4} (bound {bound:.1})",
                    if ok { "OK" } else { "FAIL" },
                    fit.p,
                    fit.q
                ),
            };
            if !ok {
                report.failed.push(line.clone());
            }
            report.line(line);
        }
        report.tables.push((format!("N{n}"), residual_csv(fits)));
    }
    Ok(())
}

fn suite_mode(job: &JobSpec, settings: &Settings, report: &mut Report) -> Result<(), CliError> {
    let cases = job.inputs.cases.unwrap_or(20);
    let names: Vec<String> = match &job.inputs.checks {
        Some(v) => v.clone(),
        None => suite::ALL.iter().map(|c| c.name.to_string()).collect(),
    };
    let mut checks = Vec::new();
    for name in &names {
        checks.push(suite::find(name).ok_or_else(|| {
            CliError::Parse(format!("unknown check `{name}` in `inputs.checks`"))
        })?);
    }
    report.line(format!("seed: {}  cases: {cases}", settings.seed));
    let results: Vec<_> = checks
        .par_iter()
        .enumerate()
        .map(|(i, c)| suite::run_cases(settings.seed.wrapping_add(i as u64), cases, c.check))
        .collect();
    for (c, r) in checks.iter().zip(results) {
        match r {
            Ok(()) => report.line(format!("PASS {} ({cases} cases)", c.name)),
            Err(e) => {
                let line = format!("FAIL {}: {e}", c.name);
                report.failed.push(line.clone());
                report.line(line);
            }
        }
    }
    Ok(())
}
