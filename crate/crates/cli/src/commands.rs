use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use gonosomal::invariant_sets::{classify_limit, observed_limit};
use gonosomal::normalized::{
    scan_conjecture, scan_from, NormalizedOperator, ScanConfig, SimplexState,
};
use gonosomal::spectral::{find_fixed_points, FixedPointSearch};
use gonosomal::state::parse_coords;
use gonosomal::suite::{run_verify, VerifyConfig};
use gonosomal::tensor::parse_tensor;
use gonosomal::{
    iterate, Error, GonosomalOperator, InheritanceTensor, IterateOptions, Mode, PopulationState,
    PropertyReport,
};

use crate::{Common, Failure};

type CmdResult = Result<(), Failure>;

fn load_tensor(source: &str) -> Result<InheritanceTensor, Failure> {
    if source == "builtin" {
        return Ok(InheritanceTensor::hemophilia());
    }
    let text =
        fs::read_to_string(source).with_context(|| format!("cannot read tensor file {source}"))?;
    let file = parse_tensor(&text).with_context(|| format!("invalid tensor file {source}"))?;
    Ok(file.tensor)
}

fn load_operator(common: &Common) -> Result<GonosomalOperator, Failure> {
    let op = GonosomalOperator::new(load_tensor(&common.tensor)?);
    if common.mode == Mode::Normalized {
        NormalizedOperator::new(op.clone())
            .context("tensor cannot drive the normalized operator")?;
    }
    Ok(op)
}

fn parse_state(op: &GonosomalOperator, text: &str) -> Result<PopulationState, Failure> {
    let coords = parse_coords(text).context("cannot parse --state")?;
    Ok(PopulationState::from_coords(coords, op.n()).context("--state does not fit the tensor")?)
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn require_hemophilia(op: &GonosomalOperator, what: &str) -> Result<(), Failure> {
    let same = op
        .tensor()
        .max_abs_diff(&InheritanceTensor::hemophilia())
        .is_some_and(|d| d <= 1e-12);
    if !same {
        return Err(Failure::Input(anyhow!(
            "{what} is defined for the hemophilia tensor only"
        )));
    }
    Ok(())
}

pub fn fixed_points(common: &Common, samples: usize, tol: f64) -> CmdResult {
    let op = load_operator(common)?;
    let search = FixedPointSearch {
        mode: common.mode,
        n_seeds: samples,
        rng_seed: common.seed,
        tol,
        ..FixedPointSearch::default()
    };
    let outcome = find_fixed_points(&op, &search)?;
    let records: Vec<String> = outcome.reports.iter().map(|r| r.to_record()).collect();
    emit(common, &records.join("\n"))
}

fn csv_header(op: &GonosomalOperator) -> String {
    let mut cols = vec!["step".to_string()];
    if op.n() == 2 && op.nu() == 2 {
        cols.extend(["x", "y", "u", "v", "sum", "(x+y)(u+v)"].map(String::from));
    } else {
        cols.extend((1..=op.n()).map(|i| format!("f{i}")));
        cols.extend((1..=op.nu()).map(|i| format!("m{i}")));
        cols.extend(["sum".to_string(), "product".to_string()]);
    }
    cols.join(",")
}

pub fn trajectory(
    common: &Common,
    state: &str,
    budget: usize,
    tol: f64,
    div_threshold: f64,
) -> CmdResult {
    let op = load_operator(common)?;
    let s0 = parse_state(&op, state)?;
    let opts = IterateOptions {
        budget,
        tol_fp: tol,
        div_threshold,
    };
    let rec = iterate(&op, &s0, common.mode, &opts)?;
    let mut out = csv_header(&op);
    out.push('\n');
    for it in &rec.iterates {
        let s = &it.state;
        let _ = writeln!(
            out,
            "{},{},{:?},{:?}",
            it.step,
            join(s.coords()),
            s.total(),
            s.block_product()
        );
    }
    let _ = writeln!(out, "# stop_reason={}", rec.stop_reason);
    let _ = writeln!(out, "# steps_taken={}", rec.steps_taken);
    emit(common, &out)
}

pub fn classify(
    common: &Common,
    state: &str,
    probe_budget: usize,
    empirical: Option<(usize, f64)>,
) -> CmdResult {
    if common.mode != Mode::Raw {
        return Err(Failure::Input(anyhow!(
            "limit classification is defined for raw mode"
        )));
    }
    let op = load_operator(common)?;
    require_hemophilia(&op, "limit classification")?;
    let s = parse_state(&op, state)?;
    let verdict = classify_limit(&s, probe_budget)?;

    let mut out = String::new();
    let _ = writeln!(out, "state={}", join(s.coords()));
    let _ = writeln!(out, "kind={}", verdict.kind);
    if let Some(rule) = verdict.rule {
        let _ = writeln!(out, "rule={rule}");
        let _ = writeln!(out, "condition={}", rule.condition());
    }
    if let Some(w) = verdict.witness {
        let _ = writeln!(out, "witness={w}");
    }
    let mut agrees = true;
    if let Some((budget, tol)) = empirical {
        let opts = IterateOptions {
            budget,
            tol_fp: tol,
            ..IterateOptions::default()
        };
        let q = s
            .as_quad()
            .expect("hemophilia states have four coordinates");
        let (kind, stop, limit) = observed_limit(&op, q, &opts)?;
        let _ = writeln!(out);
        let _ = writeln!(out, "empirical.kind={kind}");
        let _ = writeln!(out, "empirical.stop_reason={stop}");
        if let Some(l) = limit {
            let _ = writeln!(out, "empirical.limit={}", join(l.coords()));
        }
        agrees = !verdict.is_decided() || kind == verdict.kind;
        let _ = writeln!(out, "empirical.agrees={agrees}");
    }
    emit(common, &out)?;
    if agrees {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn summary(reports: &[PropertyReport]) -> String {
    let failed = reports.iter().filter(|r| !r.passed()).count();
    format!(
        "properties={}\nfailed={}\nstatus={}\n",
        reports.len(),
        failed,
        if failed == 0 { "pass" } else { "FAIL" }
    )
}

pub fn verify(common: &Common, samples: usize) -> CmdResult {
    let tensor = match load_tensor(&common.tensor) {
        Ok(t) => t,
        Err(Failure::Input(e)) if is_validation_error(&e) => {
            let report = PropertyReport::from_results("tensor validation", [(Vec::new(), false)])
                .with_detail(format!("{e:#}"));
            emit(
                common,
                &format!(
                    "{}\n{}",
                    report.to_text(),
                    summary(std::slice::from_ref(&report))
                ),
            )?;
            return Err(Failure::Property);
        }
        Err(e) => return Err(e),
    };
    let op = GonosomalOperator::new(tensor);
    let cfg = VerifyConfig {
        samples,
        seed: common.seed,
        ..VerifyConfig::default()
    };
    let reports = run_verify(&op, &cfg)?;
    let mut out = String::new();
    for r in &reports {
        out.push_str(&r.to_text());
        out.push('\n');
    }
    out.push_str(&summary(&reports));
    emit(common, &out)?;
    if reports.iter().all(PropertyReport::passed) {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}

fn is_validation_error(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::RowSum { .. } | Error::NegativeCoefficient { .. })
    )
}

pub fn scan(
    common: &Common,
    samples: usize,
    tol: f64,
    budget: usize,
    state: Option<&str>,
    table: Option<&Path>,
) -> CmdResult {
    if common.mode != Mode::Normalized {
        return Err(Failure::Input(anyhow!(
            "the convergence scan needs --mode normalized"
        )));
    }
    let op = load_operator(common)?;
    require_hemophilia(&op, "the convergence scan")?;
    let cfg = ScanConfig {
        samples,
        rng_seed: common.seed,
        tol,
        budget,
        ..ScanConfig::default()
    };
    let report = match state {
        Some(text) => {
            let start = SimplexState::new(parse_state(&op, text)?)
                .context("--state is not on the punctured simplex")?;
            scan_from(&[start], &cfg)?
        }
        None => scan_conjecture(&cfg)?,
    };
    let mut out = report.to_text();
    match table {
        Some(path) => fs::write(path, report.to_table())
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            out.push('\n');
            out.push_str(&report.to_table());
        }
    }
    emit(common, &out)?;
    if report.failures.is_empty() && report.converged == report.samples {
        Ok(())
    } else {
        Err(Failure::Property)
    }
}
