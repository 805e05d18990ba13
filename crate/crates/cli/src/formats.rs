//! On-disk JSON formats. Complex matrices are stored as split row-major
//! `re` / `im` arrays.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use schmidt_scope::channels::QuantumChannel;
use schmidt_scope::criteria::CriterionReport;
use schmidt_scope::linalg::validate_density;
use schmidt_scope::{Complex, Dims, Matrix, State, Tolerances};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub kind: String,
    pub na: usize,
    pub nb: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausEntry {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub kind: String,
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<KrausEntry>,
}

/// A bare operator, used for local filters. `im` may be omitted for real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

fn parse_json<T: DeserializeOwned>(bytes: &[u8]) -> CliResult<T> {
    let mut de = serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::usage(format!("malformed JSON: {inner}"))
        } else {
            CliError::usage(format!("field `{path}`: {inner}"))
        }
    })
}

fn check_kind(found: &str, want: &str) -> CliResult<()> {
    if found == want {
        Ok(())
    } else {
        Err(CliError::usage(format!("field `kind`: expected \"{want}\", found \"{found}\"")))
    }
}

fn to_matrix(re: &[Vec<f64>], im: Option<&[Vec<f64>]>, rows: usize, cols: usize, field: &str) -> CliResult<Matrix> {
    let check = |m: &[Vec<f64>], name: &str| -> CliResult<()> {
        if m.len() != rows {
            return Err(CliError::usage(format!("field `{field}{name}`: expected {rows} rows, found {}", m.len())));
        }
        if let Some((i, row)) = m.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(CliError::usage(format!("field `{field}{name}[{i}]`: expected {cols} entries, found {}", row.len())));
        }
        Ok(())
    };
    check(re, "re")?;
    if let Some(im) = im {
        check(im, "im")?;
    }
    let data = (0..rows * cols)
        .map(|k| {
            let (i, j) = (k / cols, k % cols);
            Complex::new(re[i][j], im.map_or(0.0, |m| m[i][j]))
        })
        .collect();
    Matrix::from_row_major(rows, cols, data).map_err(|e| CliError::usage(format!("field `{field}`: {e}")))
}

fn split(m: &Matrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    (m.real_parts(), m.imag_parts())
}

impl StateFile {
    pub fn from_state(s: &State) -> Self {
        let (re, im) = split(s.rho());
        Self { kind: "state".into(), na: s.na(), nb: s.nb(), re, im }
    }

    pub fn parse(bytes: &[u8]) -> CliResult<Self> {
        let f: Self = parse_json(bytes)?;
        check_kind(&f.kind, "state")?;
        if f.na < 2 || f.nb < 2 {
            return Err(CliError::usage(format!("fields `na`/`nb`: dimensions must be >= 2, found {}x{}", f.na, f.nb)));
        }
        Ok(f)
    }

    /// Builds the state, validating it as a density operator unless `validate` is off.
    pub fn to_state(&self, validate: bool, tols: &Tolerances<f64>) -> CliResult<State> {
        let n = self.na * self.nb;
        let m = to_matrix(&self.re, Some(&self.im), n, n, "")?;
        if validate {
            Ok(validate_density(m, self.na, self.nb, tols)?)
        } else {
            Ok(State::new_unchecked(m, Dims::new(self.na, self.nb)))
        }
    }
}

impl ChannelFile {
    pub fn from_channel(ch: &QuantumChannel<f64>) -> Self {
        let kraus = ch
            .kraus()
            .iter()
            .map(|k| {
                let (re, im) = split(k);
                KrausEntry { re, im }
            })
            .collect();
        Self { kind: "channel".into(), in_dim: ch.in_dim(), out_dim: ch.out_dim(), kraus }
    }

    pub fn parse(bytes: &[u8]) -> CliResult<Self> {
        let f: Self = parse_json(bytes)?;
        check_kind(&f.kind, "channel")?;
        if f.in_dim == 0 || f.out_dim == 0 {
            return Err(CliError::usage("fields `in_dim`/`out_dim`: dimensions must be positive"));
        }
        if f.kraus.is_empty() {
            return Err(CliError::usage("field `kraus`: at least one Kraus operator is required"));
        }
        Ok(f)
    }

    pub fn to_channel(&self, tol: f64) -> CliResult<QuantumChannel<f64>> {
        let kraus = self
            .kraus
            .iter()
            .enumerate()
            .map(|(i, k)| to_matrix(&k.re, Some(&k.im), self.out_dim, self.in_dim, &format!("kraus[{i}].")))
            .collect::<CliResult<Vec<_>>>()?;
        Ok(QuantumChannel::new(kraus, tol)?)
    }
}

impl MatrixFile {
    pub fn parse(bytes: &[u8]) -> CliResult<Self> {
        parse_json(bytes)
    }

    pub fn to_matrix(&self) -> CliResult<Matrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        to_matrix(&self.re, self.im.as_deref(), rows, cols, "")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceInfo {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
    pub rank: f64,
    pub decision: f64,
}

impl From<&Tolerances<f64>> for ToleranceInfo {
    fn from(t: &Tolerances<f64>) -> Self {
        Self { hermitian: t.hermitian, trace: t.trace, positivity: t.positivity, rank: t.rank, decision: t.decision }
    }
}

/// Output of the `schmidt`, `check` and `channel --eb-check` commands.
///
/// For channels, `spectrum` is the Choi state's Schmidt spectrum, i.e. the
/// singular values of the channel coefficient matrix divided by `in_dim`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub input: InputInfo,
    pub tolerances: ToleranceInfo,
    pub spectrum: Vec<f64>,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub purity: Option<f64>,
    pub sum_mu_squared: f64,
    pub sym_polys: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub criteria: Option<Vec<CriterionRecord>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub summary: Option<String>,
}

/// Deserializable mirror of a criterion report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub criterion_id: String,
    pub lhs: f64,
    pub bound: f64,
    pub margin: f64,
    pub verdict: String,
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl From<&CriterionReport<f64>> for CriterionRecord {
    fn from(r: &CriterionReport<f64>) -> Self {
        let value = serde_json::to_value(r).expect("reports serialize");
        serde_json::from_value(value).expect("report shape is fixed")
    }
}

impl CriterionRecord {
    pub fn detected(&self) -> bool {
        self.verdict != "Inconclusive"
    }
}
