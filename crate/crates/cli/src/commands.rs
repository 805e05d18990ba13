use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use schmidt_scope::channels::{channel_coeff_matrix, choi_state, depolarizing_channel, eb_check, QuantumChannel};
use schmidt_scope::criteria::{filter_check, rc_check, sympoly_check, theta_check, zhang_check, CriterionReport};
use schmidt_scope::schmidt::{schmidt_spectrum, symmetric_polynomials};
use schmidt_scope::states::{isotropic, max_entangled, product_state, random_density, random_pure, random_separable, werner, Seed};
use schmidt_scope::{Spectrum, State, Tolerances};

use crate::args::{Cli, Command, GenKind, GlobalOpts};
use crate::error::{CliError, CliResult, Status};
use crate::formats::{ChannelFile, CriterionRecord, InputInfo, MatrixFile, ReportDocument, StateFile};

/// What a command wants printed and the exit status it maps to.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub diagnostics: Vec<String>,
    pub status: Status,
}

pub const CRITERIA_NAMES: &str = "rc, sympoly[:l=L][:rank], theta:T, zhang, filter:LA.json,LB.json";

#[derive(Debug, Clone, PartialEq)]
pub enum CriterionSpec {
    Rc,
    /// `l = None` means the top degree (determinant bound).
    Sympoly { l: Option<usize>, rank: bool },
    Theta(f64),
    Zhang,
    Filter { a: PathBuf, b: PathBuf },
}

/// Parses a comma-separated criterion list. The filter entry consumes the
/// following comma-separated token as its second file.
pub fn parse_criteria(list: &str) -> CliResult<Vec<CriterionSpec>> {
    let unknown = |t: &str| CliError::usage(format!("unknown criterion `{t}`; valid criteria: {CRITERIA_NAMES}"));
    let mut tokens = list.split(',').map(str::trim);
    let mut specs = Vec::new();
    while let Some(token) = tokens.next() {
        if token.is_empty() {
            continue;
        }
        let (name, rest) = token.split_once(':').unwrap_or((token, ""));
        let spec = match name {
            "rc" if rest.is_empty() => CriterionSpec::Rc,
            "zhang" if rest.is_empty() => CriterionSpec::Zhang,
            "sympoly" => {
                let (mut l, mut rank) = (None, false);
                for part in rest.split(':').filter(|p| !p.is_empty()) {
                    match part {
                        "rank" => rank = true,
                        "free" | "rank-free" => rank = false,
                        _ => {
                            let v = part.strip_prefix("l=").unwrap_or(part);
                            let parsed = v.parse::<usize>().map_err(|_| CliError::usage(format!("sympoly: invalid degree `{part}`")))?;
                            l = Some(parsed);
                        }
                    }
                }
                CriterionSpec::Sympoly { l, rank }
            }
            "theta" => {
                let v = rest.strip_prefix("theta=").unwrap_or(rest);
                let theta = v.parse::<f64>().map_err(|_| CliError::usage(format!("theta: expected an angle in [0, pi], found `{rest}`")))?;
                CriterionSpec::Theta(theta)
            }
            "filter" => {
                let b = tokens.next().filter(|t| !t.is_empty() && !rest.is_empty());
                match b {
                    Some(b) => CriterionSpec::Filter { a: rest.into(), b: b.into() },
                    None => return Err(CliError::usage("filter: expected filter:LA.json,LB.json")),
                }
            }
            _ => return Err(unknown(token)),
        };
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CliError::usage(format!("no criteria given; valid criteria: {CRITERIA_NAMES}")));
    }
    Ok(specs)
}

pub fn tolerances(g: &GlobalOpts) -> CliResult<Tolerances<f64>> {
    let mut t = Tolerances::default();
    let checked = |name: &str, v: f64| -> CliResult<f64> {
        if v.is_finite() && v >= 0.0 {
            Ok(v)
        } else {
            Err(CliError::usage(format!("--{name} must be a finite non-negative number, found {v}")))
        }
    };
    if let Some(v) = g.tol {
        t = t.with_validation(checked("tol", v)?);
    }
    if let Some(v) = g.rank_tol {
        t.rank = checked("rank-tol", v)?;
    }
    if let Some(v) = g.decision_tol {
        t.decision = checked("decision-tol", v)?;
    }
    Ok(t)
}

fn read_input(path: &str) -> CliResult<(Vec<u8>, InputInfo)> {
    let bytes = if path == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf).map_err(|e| CliError::usage(format!("cannot read stdin: {e}")))?;
        buf
    } else {
        fs::read(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?
    };
    let sha256 = hex::encode(Sha256::digest(&bytes));
    Ok((bytes, InputInfo { path: path.to_owned(), sha256 }))
}

fn write_output(path: Option<&str>, text: &str) -> CliResult<String> {
    match path {
        None | Some("-") => Ok(text.to_owned()),
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::usage(format!("cannot write {p}: {e}")))?;
            Ok(String::new())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn spectrum_section(input: InputInfo, tols: &Tolerances<f64>, sp: &Spectrum, purity: Option<f64>) -> ReportDocument {
    ReportDocument {
        input,
        tolerances: tols.into(),
        spectrum: sp.coeffs.clone(),
        rank: sp.rank,
        purity,
        sum_mu_squared: sp.sum_of_squares(),
        sym_polys: symmetric_polynomials(sp).values,
        criteria: None,
        summary: None,
    }
}

fn load_filter(path: &Path) -> CliResult<schmidt_scope::Matrix> {
    let bytes = fs::read(path).map_err(|e| CliError::usage(format!("cannot read filter {}: {e}", path.display())))?;
    MatrixFile::parse(&bytes)
        .and_then(|f| f.to_matrix())
        .map_err(|e| e.context(format!("filter {}", path.display())))
}

fn evaluate(s: &State, spec: &CriterionSpec, tols: &Tolerances<f64>, normalize: bool) -> CliResult<CriterionReport<f64>> {
    Ok(match spec {
        CriterionSpec::Rc => rc_check(s, tols)?,
        CriterionSpec::Sympoly { l, rank } => sympoly_check(s, l.unwrap_or(s.dims().schmidt_len()), *rank, tols)?,
        CriterionSpec::Theta(theta) => theta_check(s, *theta, tols)?,
        CriterionSpec::Zhang => zhang_check(s, tols)?,
        CriterionSpec::Filter { a, b } => filter_check(s, &load_filter(a)?, &load_filter(b)?, normalize, tols)?,
    })
}

fn verdict_line(name: &str, r: &CriterionReport<f64>) -> String {
    format!("{name}: {} {:?} (lhs {:.6}, bound {:.6})", r.criterion_id, r.verdict, r.lhs, r.bound)
}

struct Checked {
    report: ReportDocument,
    diagnostics: Vec<String>,
    detected: bool,
}

fn check_one(path: &str, specs: &[CriterionSpec], opts: &GlobalOpts, tols: &Tolerances<f64>, normalize: bool) -> CliResult<Checked> {
    let (bytes, input) = read_input(path)?;
    let state = StateFile::parse(&bytes)?.to_state(!opts.no_validate, tols)?;
    let sp = schmidt_spectrum(&state, tols.rank)?;
    let mut report = spectrum_section(input, tols, &sp, Some(state.purity()));
    let mut records = Vec::with_capacity(specs.len());
    let mut diagnostics = Vec::new();
    for spec in specs {
        let r = evaluate(&state, spec, tols, normalize)?;
        diagnostics.push(verdict_line(path, &r));
        records.push(CriterionRecord::from(&r));
    }
    let detected = records.iter().any(CriterionRecord::detected);
    report.criteria = Some(records);
    report.summary = Some(if detected { "EntanglementDetected" } else { "Inconclusive" }.into());
    Ok(Checked { report, diagnostics, detected })
}

fn cmd_schmidt(path: &str, opts: &GlobalOpts, tols: &Tolerances<f64>) -> CliResult<Output> {
    let (bytes, input) = read_input(path)?;
    let state = StateFile::parse(&bytes)?.to_state(!opts.no_validate, tols)?;
    let sp = schmidt_spectrum(&state, tols.rank)?;
    let report = spectrum_section(input, tols, &sp, Some(state.purity()));
    let diag = format!("{path}: Schmidt rank {} of {}, purity {:.6}", sp.rank, sp.len(), state.purity());
    Ok(Output { stdout: to_json(&report), diagnostics: vec![diag], status: Status::Inconclusive })
}

fn cmd_check(path: Option<&str>, batch: Option<&Path>, criteria: &str, normalize: bool, opts: &GlobalOpts, tols: &Tolerances<f64>) -> CliResult<Output> {
    let specs = parse_criteria(criteria)?;
    let Some(dir) = batch else {
        let path = path.unwrap_or("-");
        let c = check_one(path, &specs, opts, tols, normalize)?;
        let status = if c.detected { Status::Detected } else { Status::Inconclusive };
        return Ok(Output { stdout: to_json(&c.report), diagnostics: c.diagnostics, status });
    };

    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::usage(format!("cannot read directory {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<(String, CliResult<Checked>)> = files
        .par_iter()
        .map(|p| {
            let name = p.display().to_string();
            let r = check_one(&name, &specs, opts, tols, normalize);
            (name, r)
        })
        .collect();

    let mut entries = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::new();
    let (mut any_detected, mut worst_error) = (false, None::<Status>);
    for (name, result) in results {
        match result {
            Ok(c) => {
                any_detected |= c.detected;
                diagnostics.extend(c.diagnostics);
                entries.push(serde_json::to_value(&c.report).expect("serializable"));
            }
            Err(e) => {
                worst_error = worst_error.max(Some(e.status));
                diagnostics.push(format!("{name}: error: {e}"));
                entries.push(json!({ "input": { "path": name }, "error": e.message, "exit_code": e.status.code() }));
            }
        }
    }
    let status = worst_error.unwrap_or(if any_detected { Status::Detected } else { Status::Inconclusive });
    Ok(Output { stdout: to_json(&entries), diagnostics, status })
}

fn cmd_channel(path: &str, eb: Option<usize>, rank: bool, choi: Option<&str>, tols: &Tolerances<f64>) -> CliResult<Output> {
    let (bytes, input) = read_input(path)?;
    let channel: QuantumChannel<f64> = ChannelFile::parse(&bytes)?.to_channel(tols.trace)?;
    if let Some(out) = choi {
        let text = to_json(&StateFile::from_state(&choi_state(&channel)?));
        let stdout = write_output(Some(out), &text)?;
        let diag = format!("{path}: Choi state ({}x{}) written to {out}", channel.out_dim(), channel.in_dim());
        return Ok(Output { stdout, diagnostics: vec![diag], status: Status::Inconclusive });
    }
    let l = eb.ok_or_else(|| CliError::usage("channel: one of --eb-check or --choi is required"))?;
    let r = eb_check(&channel, l, rank, tols)?;
    let sp = channel_coeff_matrix(&channel)?.normalized_spectrum(tols.rank)?;
    let mut report = spectrum_section(input, tols, &sp, None);
    let detected = r.detected();
    report.criteria = Some(vec![CriterionRecord::from(&r)]);
    report.summary = Some(if detected { "NotEB" } else { "Inconclusive" }.into());
    let status = if detected { Status::Detected } else { Status::Inconclusive };
    Ok(Output { stdout: to_json(&report), diagnostics: vec![verdict_line(path, &r)], status })
}

fn require(value: Option<f64>, flag: &str, kind: &str) -> CliResult<f64> {
    value.ok_or_else(|| CliError::usage(format!("gen {kind}: --{flag} is required")))
}

fn require_dims(na: usize, nb: usize) -> CliResult<()> {
    if na < 2 || nb < 2 {
        return Err(CliError::usage(format!("--na and --nb must be >= 2, found {na} and {nb}")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: GenKind,
    p: Option<f64>,
    f: Option<f64>,
    n: usize,
    (na, nb): (usize, usize),
    seed: u64,
    terms: Option<usize>,
    pure: bool,
    output: Option<&Path>,
) -> CliResult<Output> {
    let state = match kind {
        GenKind::Bell => max_entangled(n)?,
        GenKind::Werner => werner(require(p, "p", "werner")?)?,
        GenKind::Isotropic => isotropic(require(f, "f", "isotropic")?, n)?,
        GenKind::Random => {
            require_dims(na, nb)?;
            match terms {
                Some(0) => return Err(CliError::usage("--terms must be >= 1")),
                Some(t) => random_separable(na, nb, t, Seed(seed)),
                None if pure => random_pure(na, nb, Seed(seed)),
                None => State::new(random_density(na * nb, Seed(seed)), na, nb)?,
            }
        }
        GenKind::Product => {
            require_dims(na, nb)?;
            product_state(&random_density(na, Seed(seed)), &random_density(nb, Seed(seed.wrapping_add(1))))?
        }
        GenKind::ChannelDepolarizing => {
            let ch = depolarizing_channel(n, require(p, "p", "channel-depolarizing")?)?;
            let text = to_json(&ChannelFile::from_channel(&ch));
            let stdout = write_output(output.and_then(Path::to_str), &text)?;
            return Ok(Output { stdout, diagnostics: Vec::new(), status: Status::Inconclusive });
        }
    };
    let text = to_json(&StateFile::from_state(&state));
    let stdout = write_output(output.and_then(Path::to_str), &text)?;
    Ok(Output { stdout, diagnostics: Vec::new(), status: Status::Inconclusive })
}

pub fn run(cli: &Cli) -> CliResult<Output> {
    let opts = &cli.global;
    let tols = tolerances(opts)?;
    match &cli.command {
        Command::Schmidt { path } => cmd_schmidt(path, opts, &tols),
        Command::Check { path, criteria, batch, normalize_filters } => {
            cmd_check(path.as_deref(), batch.as_deref(), criteria, *normalize_filters, opts, &tols)
        }
        Command::Channel { path, eb_check, rank, choi } => cmd_channel(path, *eb_check, *rank, choi.as_deref(), &tols),
        Command::Gen { kind, p, f, n, na, nb, seed, terms, pure, output } => {
            cmd_gen(*kind, *p, *f, *n, (*na, *nb), *seed, *terms, *pure, output.as_deref())
        }
    }
}
