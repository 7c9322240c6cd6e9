use std::path::Path;
use std::time::Instant;

use qdistill_core::distill::{self, ScreenEntry};
use qdistill_core::maps::{self, Side};
use qdistill_core::states::{self, DensityMatrix};
use qdistill_core::witness::{self, ClosedFormMap, NamedMap};
use qdistill_core::{PureVector, SearchParams, Subsystem};
use serde_json::json;

use crate::cli::{
    CheckArgs, Cli, Command, DistillArgs, ExportMapArgs, Family, GenArgs, KposArgs, SweepArgs, SweepFamily,
};
use crate::io::{self, FileError, StateFile};
use crate::report::{kind_name, CertificateRecord, InputDigest, RunReport, VerdictRecord};

pub const EXIT_VIOLATION: i32 = 0;
pub const EXIT_NONE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error(transparent)]
    Core(#[from] qdistill_core::Error),
    #[error("{0}")]
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::File(FileError::Io { .. }) => EXIT_IO,
            _ => EXIT_INPUT,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Result of one command: the report, the process exit code, a short
/// human-readable summary and optional primary output (a state or CSV).
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub exit_code: i32,
    pub summary: String,
    pub payload: Option<String>,
}

pub fn run(cli: &Cli, argv: Vec<String>) -> Result<Outcome> {
    let start = Instant::now();
    let mut outcome = match &cli.command {
        Command::Gen(a) => gen(a, argv)?,
        Command::Distill(a) => distill_cmd(a, argv)?,
        Command::Kpos(a) => kpos(a, argv)?,
        Command::Sweep(a) => sweep_cmd(a, argv)?,
        Command::Check(a) => check(a, argv)?,
        Command::ExportMap(a) => export_map(a, argv)?,
    };
    outcome.report.timing_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(outcome)
}

fn load_density(path: &Path) -> Result<DensityMatrix> {
    let op = io::load_state(path)?;
    DensityMatrix::new(op).map_err(|e| CliError::Input(format!("{}: not a density matrix: {e}", path.display())))
}

fn exit_for(violation: bool) -> i32 {
    if violation {
        EXIT_VIOLATION
    } else {
        EXIT_NONE
    }
}

/// Builds a state from one of the standard families.
pub fn generate(a: &GenArgs) -> Result<DensityMatrix> {
    let need = |v: Option<f64>, name: &str| {
        v.ok_or_else(|| CliError::Input(format!("{:?} requires --{name}", a.family).to_lowercase()))
    };
    Ok(match a.family {
        Family::Werner => states::werner(a.d, need(a.alpha, "alpha")?)?,
        Family::Isotropic => states::isotropic(a.d, need(a.fidelity, "fidelity")?)?,
        Family::Maxent => states::max_entangled_state(a.d)?,
        Family::Random => {
            let db = a.db.unwrap_or(a.d);
            states::random_density(a.d, db, a.rank.unwrap_or(a.d * db), a.seed)?
        }
    })
}

fn gen(a: &GenArgs, argv: Vec<String>) -> Result<Outcome> {
    let rho = generate(a)?;
    let mut report = RunReport::new(argv, (a.family == Family::Random).then_some(a.seed));
    let source = a.out.as_ref().map_or("<stdout>".into(), |p| p.display().to_string());
    report.inputs.push(InputDigest::of(&source, rho.op()));
    let file = StateFile::state(rho.op().clone());
    let payload = match &a.out {
        Some(path) => {
            file.save(path)?;
            None
        }
        None => Some(file.to_json()?),
    };
    let (da, db) = rho.dims();
    Ok(Outcome { summary: format!("wrote {da}x{db} state to {source}"), report, exit_code: 0, payload })
}

fn screen_json(entries: &[ScreenEntry]) -> serde_json::Value {
    entries
        .iter()
        .map(|e| {
            json!({
                "map": e.map.tag(),
                "side": if e.side == Side::Right { "right" } else { "left" },
                "min_eigenvalue": e.min_eigenvalue,
                "witness_value": e.witness_value,
                "flagged": e.flagged,
                "certificate_value": e.certificate.as_ref().map(|c| c.1),
            })
        })
        .collect()
}

fn certified(label: &str, v: &PureVector, value: f64, copies: usize, tol: f64) -> VerdictRecord {
    VerdictRecord {
        label: label.into(),
        kind: kind_name(distill::verdict_kind(value, tol)).into(),
        value,
        warning: false,
        rank_bound: 2,
        copies,
        best_restart: None,
        certificate: Some(CertificateRecord::of(v)),
    }
}

/// Pre-pass plus search; the last record is the combined verdict.
pub fn distill_records(
    rho: &DensityMatrix,
    copies: usize,
    prepass: bool,
    p: &SearchParams,
) -> Result<(Vec<VerdictRecord>, serde_json::Value)> {
    if copies == 0 {
        return Err(CliError::Input("--copies must be at least 1".into()));
    }
    let mut records = Vec::new();
    let mut candidates: Vec<(String, PureVector, f64)> = Vec::new();
    let mut details = json!({ "copies": copies, "prepass": prepass });

    let mut one_copy_certs: Vec<(String, PureVector)> = Vec::new();
    if prepass {
        let screen = distill::named_map_screen(rho, p.neg_tol)?;
        details["screen"] = screen_json(&screen);
        let best = screen
            .iter()
            .filter_map(|e| e.certificate.as_ref().map(|c| (e, c)))
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1));
        if let Some((e, (v, value))) = best {
            let side = if e.side == Side::Right { "right" } else { "left" };
            let label = format!("prepass_{}_{side}", e.map.tag());
            records.push(certified(&label, v, *value, 1, p.neg_tol));
            one_copy_certs.push((label, v.clone()));
        }
    }

    let one = distill::one_distillable(rho, p)?;
    records.push(VerdictRecord::of("search_1", &one));
    if let Some(c) = &one.certificate {
        one_copy_certs.push(("search_1".into(), c.clone()));
    }

    if copies == 1 {
        for (label, v) in &one_copy_certs {
            candidates.push((label.clone(), v.clone(), v.expectation(&rho.partial_transpose())?));
        }
    } else {
        for (label, v) in &one_copy_certs {
            let (ext, value) = distill::extend_certificate(rho, v, copies)?;
            let label = format!("{label}_extended");
            records.push(certified(&label, &ext, value, copies, p.neg_tol));
            candidates.push((label, ext, value));
        }
        let many = distill::n_distillable(rho, copies, p)?;
        records.push(VerdictRecord::of(&format!("search_{copies}"), &many));
        if let Some(c) = &many.certificate {
            candidates.push((format!("search_{copies}"), c.clone(), many.certificate_value.unwrap_or(many.value)));
        }
    }

    let best = candidates.iter().filter(|c| c.2 < -p.neg_tol).min_by(|a, b| a.2.total_cmp(&b.2));
    let last_search = records.iter().rev().find(|r| r.label.starts_with("search_")).cloned().expect("search ran");
    let mut fin = match best {
        Some((label, v, value)) => {
            details["final_source"] = json!(label);
            certified("final", v, *value, copies, p.neg_tol)
        }
        None => VerdictRecord { label: "final".into(), ..last_search },
    };
    fin.copies = copies;
    records.push(fin);
    Ok((records, details))
}

fn distill_cmd(a: &DistillArgs, argv: Vec<String>) -> Result<Outcome> {
    let p = a.search.params();
    p.validate()?;
    let rho = load_density(&a.input)?;
    let mut report = RunReport::new(argv, Some(p.seed));
    report.inputs.push(InputDigest::of(&a.input.display().to_string(), rho.op()));
    let (records, details) = distill_records(&rho, a.copies, !a.no_prepass, &p)?;
    let fin = records.last().expect("final record").clone();
    report.verdicts = records;
    report.details = details;
    let summary = match &fin.certificate {
        Some(c) if fin.is_violation() => format!(
            "violation: value {:.6e} on {} copies, certificate Schmidt coefficients {:?}",
            fin.value, a.copies, c.schmidt_coefficients
        ),
        _ => format!("no violation found: best value {:.6e} on {} copies (heuristic search)", fin.value, a.copies),
    };
    Ok(Outcome { summary, exit_code: exit_for(fin.is_violation()), report, payload: None })
}

fn kpos(a: &KposArgs, argv: Vec<String>) -> Result<Outcome> {
    let p = a.search.params();
    p.validate()?;
    let mut report = RunReport::new(argv, Some(p.seed));
    let (choi, source) = if let Some(map) = a.map {
        let d = a.d.ok_or_else(|| CliError::Input("--map requires --d".into()))?;
        let choi = maps::jamiolkowski_operator(&ClosedFormMap { map, d })?;
        let choi = if a.transpose { choi.partial_transpose(Subsystem::B) } else { choi };
        (choi, format!("{}{}", if a.transpose { "transpose∘" } else { "" }, map.tag()))
    } else if let Some(path) = &a.operator {
        let file = StateFile::load(path)?;
        let d = file.op.dim_a() as f64;
        let scale = file.jamiolkowski_scale.unwrap_or(d);
        (file.op.scale(d / scale), path.display().to_string())
    } else if let Some(path) = &a.from_state {
        let rho = load_density(path)?;
        let (da, db) = rho.dims();
        if da != db {
            return Err(CliError::Input("--from-state needs equal local dimensions".into()));
        }
        report.inputs.push(InputDigest::of(&path.display().to_string(), rho.op()));
        let s = maps::s_map_from_state(&rho)?;
        (maps::jamiolkowski_operator(&s.transpose_s)?, format!("T∘S({})", path.display()))
    } else {
        unreachable!("clap requires a map source")
    };
    let map = maps::map_from_operator(&choi);
    let v = maps::is_k_positive(&map, a.k, &p)?;
    report.verdicts.push(VerdictRecord::of("kpos", &v));
    report.details = json!({ "map": source, "k": a.k, "dims": [choi.dim_a(), choi.dim_b()] });
    let summary = if v.is_violation() {
        format!("{source} is not {}-positive: value {:.6e}", a.k, v.value)
    } else {
        format!("no {}-positivity violation found for {source}: best value {:.6e} (heuristic search)", a.k, v.value)
    };
    Ok(Outcome { summary, exit_code: exit_for(v.is_violation()), report, payload: None })
}

/// One CSV row of a sweep.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub min_pt_eig: f64,
    pub reduction_value: f64,
    pub rank2_min_value: f64,
    pub verdict: &'static str,
}

pub fn sweep(
    family: SweepFamily,
    d: usize,
    from: f64,
    to: f64,
    steps: usize,
    copies: usize,
    p: &SearchParams,
) -> Result<Vec<SweepRow>> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Input("sweep needs a finite range and at least one step".into()));
    }
    let reduction = witness::named_witness_operator(NamedMap::Lambda1, d)?;
    (0..steps)
        .map(|i| {
            let param = if steps == 1 { from } else { from + (to - from) * i as f64 / (steps - 1) as f64 };
            let rho = match family {
                SweepFamily::Werner => states::werner(d, param)?,
                SweepFamily::Isotropic => states::isotropic(d, param)?,
            };
            let v = distill::n_distillable(&rho, copies, p)?;
            Ok(SweepRow {
                param,
                min_pt_eig: rho.min_pt_eigenvalue(),
                reduction_value: rho.expect(&reduction)?,
                rank2_min_value: v.value,
                verdict: kind_name(v.kind),
            })
        })
        .collect()
}

pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn sweep_cmd(a: &SweepArgs, argv: Vec<String>) -> Result<Outcome> {
    let p = a.search.params();
    p.validate()?;
    let rows = sweep(a.family, a.d, a.from, a.to, a.steps, a.copies, &p)?;
    let text = rows_to_csv(&rows)?;
    let mut report = RunReport::new(argv, Some(p.seed));
    report.details = json!({ "rows": rows });
    let flagged = rows.iter().filter(|r| r.verdict == "violation").count();
    let payload = match &a.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|source| FileError::Io { path: path.clone(), source })?;
            None
        }
        None => Some(text),
    };
    Ok(Outcome {
        summary: format!("{} rows, {flagged} with a violation", rows.len()),
        exit_code: exit_for(flagged > 0),
        report,
        payload,
    })
}

fn check(a: &CheckArgs, argv: Vec<String>) -> Result<Outcome> {
    let op = io::load_state(&a.input)?;
    let source = a.input.display().to_string();
    let mut report = RunReport::new(argv, None);
    report.inputs.push(InputDigest::of(&source, &op));
    let hermitian_defect = op.hermitian_defect();
    let trace = op.trace();
    let mut failed = Vec::new();
    if hermitian_defect > states::STATE_TOL {
        failed.push(format!("not Hermitian (defect {hermitian_defect:.3e})"));
    }
    if (trace.re - 1.0).abs() > states::STATE_TOL || trace.im.abs() > states::STATE_TOL {
        failed.push(format!("trace {:.12} differs from 1", trace.re));
    }
    let min_eigenvalue = if failed.is_empty() { Some(op.min_eigenvalue()?) } else { None };
    if let Some(m) = min_eigenvalue.filter(|m| *m < -states::STATE_TOL) {
        failed.push(format!("not positive semidefinite (min eigenvalue {m:.3e})"));
    }
    report.details = json!({
        "hermitian_defect": hermitian_defect,
        "trace": trace.re,
        "min_eigenvalue": min_eigenvalue,
        "failed": failed,
    });
    if !failed.is_empty() {
        let summary = format!("{source}: {}", failed.join("; "));
        return Ok(Outcome { summary, exit_code: EXIT_INPUT, report, payload: None });
    }
    let rho = DensityMatrix::new(op)?;
    let (da, db) = rho.dims();
    let mut lines = vec![format!("{source}: {da}x{db} state, min PT eigenvalue {:.6e}", rho.min_pt_eigenvalue())];
    let mut values = serde_json::Map::new();
    let mut violation = false;
    if da == db {
        for map in NamedMap::ALL {
            let value = rho.expect(&witness::named_witness_operator(map, da)?)?;
            violation |= value < -a.tol;
            lines.push(format!("  {} witness value {value:.6e}", map.tag()));
            values.insert(map.tag().into(), json!(value));
        }
    }
    report.details["witness_values"] = values.into();
    Ok(Outcome { summary: lines.join("\n"), exit_code: exit_for(violation), report, payload: None })
}

fn export_map(a: &ExportMapArgs, argv: Vec<String>) -> Result<Outcome> {
    let choi = maps::jamiolkowski_operator(&ClosedFormMap { map: a.map, d: a.d })?;
    let choi = if a.transpose { choi.partial_transpose(Subsystem::B) } else { choi };
    io::save_map(&a.out, &choi)?;
    let mut report = RunReport::new(argv, None);
    report.details = json!({ "map": a.map.tag(), "d": a.d, "transpose": a.transpose, "jamiolkowski_scale": a.d });
    Ok(Outcome {
        summary: format!("wrote Jamiołkowski operator of {} to {}", a.map.tag(), a.out.display()),
        exit_code: 0,
        report,
        payload: None,
    })
}
