//! Versioned text formats.
//!
//! JSON documents carry a top-level `"schema"` key (`pvec-v1`, `rho-v1`,
//! `ham-v1`, `ggmmb-v1`, `tmat-v1`, `witness-v1`, `model-v1`) and keep full
//! `f64` precision so files can be chained between commands. Delimited
//! tables start with `# schema: <name>` comment lines and print numbers to
//! 10 significant digits.

use std::io::Write;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classifier::ClassifierModel;
use crate::datagen::{ClassStats, Dataset, GammaHistogram, GenerationConfig, Label, LabeledExample};
use crate::dynamics::{HamiltonianSpec, TransferMatrix};
use crate::error::{NsitError, Result};
use crate::gellmann::GeneratorBasis;
use crate::linalg::CMatrix;
use crate::measurement::{ScanReport, WitnessReport};
use crate::states::{DensityMatrix, ProbabilityVector};

pub const PVEC: &str = "pvec-v1";
pub const RHO: &str = "rho-v1";
pub const HAM: &str = "ham-v1";
pub const GGMMB: &str = "ggmmb-v1";
pub const TMAT: &str = "tmat-v1";
pub const WITNESS: &str = "witness-v1";
pub const MODEL: &str = "model-v1";
pub const DATASET: &str = "dataset-v1";
pub const EVOLUTION: &str = "evolution-v1";
pub const HISTOGRAM: &str = "histogram-v1";

/// `x` rounded to 10 significant digits, printed without an exponent.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    rounded.to_string()
}

pub fn to_json<T: Serialize>(schema: &str, value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    match &mut v {
        Value::Object(map) => {
            map.insert("schema".to_string(), Value::String(schema.to_string()));
        }
        _ => return Err(NsitError::Internal("schema payload must be a JSON object".into())),
    }
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

pub fn from_json<T: DeserializeOwned>(schema: &str, text: &str) -> Result<T> {
    let mut v: Value = serde_json::from_str(text)?;
    let found = match &mut v {
        Value::Object(map) => map.remove("schema"),
        _ => None,
    };
    match found {
        Some(Value::String(s)) if s == schema => {}
        Some(Value::String(s)) => {
            return Err(NsitError::SchemaMismatch {
                expected: schema.to_string(),
                found: s,
            })
        }
        _ => {
            return Err(NsitError::SchemaMismatch {
                expected: schema.to_string(),
                found: "<missing>".to_string(),
            })
        }
    }
    Ok(serde_json::from_value(v)?)
}

/// The `"schema"` value of a JSON document, if any.
pub fn schema_of(text: &str) -> Option<String> {
    let v: Value = serde_json::from_str(text).ok()?;
    v.get("schema")?.as_str().map(str::to_string)
}

#[derive(Debug, Serialize, Deserialize)]
struct PvecFile {
    dim: usize,
    tuples: Vec<Vec<f64>>,
}

pub fn write_probability_vector(p: &ProbabilityVector) -> Result<String> {
    to_json(
        PVEC,
        &PvecFile {
            dim: p.dim(),
            tuples: p.tuples().map(<[f64]>::to_vec).collect(),
        },
    )
}

pub fn read_probability_vector(text: &str) -> Result<ProbabilityVector> {
    let f: PvecFile = from_json(PVEC, text)?;
    if f.tuples.len() != f.dim * f.dim - 1 {
        return Err(NsitError::Malformed(format!(
            "expected {} tuples, found {}",
            f.dim * f.dim - 1,
            f.tuples.len()
        )));
    }
    ProbabilityVector::from_tuples(f.dim, &f.tuples)
}

#[derive(Debug, Serialize, Deserialize)]
struct ComplexFile {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    field: Option<[f64; 3]>,
}

fn split_complex(m: &CMatrix) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let rows = |f: fn(&num_complex::Complex64) -> f64| {
        m.row_iter().map(|r| r.iter().map(f).collect()).collect()
    };
    (rows(|z| z.re), rows(|z| z.im))
}

fn join_complex(dim: usize, re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix> {
    if dim < 2 {
        return Err(NsitError::InvalidDimension(dim));
    }
    let ok = |rows: &[Vec<f64>]| rows.len() == dim && rows.iter().all(|r| r.len() == dim);
    if !ok(re) || !ok(im) {
        return Err(NsitError::Malformed(format!("matrix must be {dim}x{dim}")));
    }
    Ok(CMatrix::from_fn(dim, dim, |i, j| num_complex::Complex64::new(re[i][j], im[i][j])))
}

pub fn write_density(rho: &DensityMatrix) -> Result<String> {
    let (re, im) = split_complex(rho.matrix());
    to_json(RHO, &ComplexFile { dim: rho.dim(), re, im, field: None })
}

pub fn read_density(text: &str) -> Result<DensityMatrix> {
    let f: ComplexFile = from_json(RHO, text)?;
    DensityMatrix::new(join_complex(f.dim, &f.re, &f.im)?)
}

pub fn write_hamiltonian(h: &HamiltonianSpec) -> Result<String> {
    let (re, im) = split_complex(h.matrix());
    to_json(HAM, &ComplexFile { dim: h.dim(), re, im, field: h.field() })
}

pub fn read_hamiltonian(text: &str) -> Result<HamiltonianSpec> {
    let f: ComplexFile = from_json(HAM, text)?;
    if let Some(b) = f.field {
        if f.dim != 2 {
            return Err(NsitError::Malformed("a field triple requires dim 2".into()));
        }
        return HamiltonianSpec::qubit_field(b);
    }
    HamiltonianSpec::from_matrix(join_complex(f.dim, &f.re, &f.im)?)
}

fn pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[derive(Debug, Serialize)]
struct GeneratorEntry {
    index: usize,
    matrix: Vec<Vec<[f64; 2]>>,
    eigenvalues: Vec<f64>,
    projectors: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Debug, Serialize)]
struct BasisFile {
    dim: usize,
    generators: Vec<GeneratorEntry>,
}

/// Matrices as rows of `[re, im]` pairs; generator indices are 1-based.
pub fn write_basis(basis: &GeneratorBasis) -> Result<String> {
    let generators = (0..basis.len())
        .map(|n| GeneratorEntry {
            index: n + 1,
            matrix: pairs(basis.generator(n)),
            eigenvalues: basis.eigenvalues(n).to_vec(),
            projectors: basis.projectors(n).iter().map(pairs).collect(),
        })
        .collect();
    to_json(GGMMB, &BasisFile { dim: basis.dim(), generators })
}

#[derive(Debug, Serialize, Deserialize)]
struct TmatFile {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

pub fn write_transfer_matrix(h: &TransferMatrix) -> Result<String> {
    let rows = h.matrix().row_iter().map(|r| r.iter().copied().collect()).collect();
    to_json(TMAT, &TmatFile { dim: h.dim(), rows })
}

pub fn read_transfer_matrix(text: &str) -> Result<TransferMatrix> {
    let f: TmatFile = from_json(TMAT, text)?;
    let size = f.rows.len();
    if f.rows.iter().any(|r| r.len() != size) {
        return Err(NsitError::Malformed("transfer matrix must be square".into()));
    }
    TransferMatrix::new(f.dim, DMatrix::from_fn(size, size, |i, j| f.rows[i][j]))
}

/// Witness report with 1-based generator and outcome indices, including
/// those of the scan's first negative component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub dim: usize,
    pub generator: usize,
    pub outcome: usize,
    pub gamma: f64,
    pub negative_eigenvalues: Vec<f64>,
    pub spectrum: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanReport>,
}

impl WitnessFile {
    pub fn new(dim: usize, report: &WitnessReport, scan: Option<ScanReport>) -> Self {
        WitnessFile {
            dim,
            generator: report.record.n + 1,
            outcome: report.record.k + 1,
            gamma: report.gamma,
            negative_eigenvalues: report.negative_eigenvalues.clone(),
            spectrum: report.spectrum.clone(),
            scan: scan.map(|mut s| {
                if let Some(c) = s.first_negative.as_mut() {
                    c.n += 1;
                    c.k += 1;
                }
                s
            }),
        }
    }
}

pub fn write_witness(w: &WitnessFile) -> Result<String> {
    to_json(WITNESS, w)
}

pub fn read_witness(text: &str) -> Result<WitnessFile> {
    from_json(WITNESS, text)
}

pub fn write_model(model: &ClassifierModel) -> Result<String> {
    to_json(MODEL, model)
}

pub fn read_model(text: &str) -> Result<ClassifierModel> {
    let model: ClassifierModel = from_json(MODEL, text)?;
    model.validate()?;
    Ok(model)
}

fn join_sig(values: impl IntoIterator<Item = f64>) -> String {
    values.into_iter().map(fmt_sig).collect::<Vec<_>>().join(",")
}

/// Dataset table: a `#` metadata block (schema, config and sampler
/// description as JSON, acceptance statistics), a column header, then one
/// row `label,dim,p_1..p_M,gamma,seed` per example.
pub fn write_dataset<W: Write>(dataset: &Dataset, out: &mut W) -> Result<()> {
    writeln!(out, "# schema: {DATASET}")?;
    writeln!(out, "# config: {}", serde_json::to_string(&dataset.config)?)?;
    for line in dataset.config.sampler_description() {
        writeln!(out, "# sampler: {line}")?;
    }
    for s in &dataset.stats {
        writeln!(out, "# stats: {}", serde_json::to_string(s)?)?;
    }
    let len = dataset.config.dim * (dataset.config.dim * dataset.config.dim - 1);
    let columns: Vec<String> = (1..=len).map(|i| format!("p{i}")).collect();
    writeln!(out, "label,dim,{},gamma,seed", columns.join(","))?;
    for e in &dataset.examples {
        writeln!(
            out,
            "{},{},{},{},{}",
            e.label,
            e.vector.dim(),
            join_sig(e.vector.as_slice().iter().copied()),
            fmt_sig(e.gamma),
            e.seed
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    pub config: Option<GenerationConfig>,
    pub stats: Vec<ClassStats>,
    pub examples: Vec<LabeledExample>,
}

pub fn read_dataset(text: &str) -> Result<DatasetFile> {
    let mut lines = text.lines().enumerate().peekable();
    let mut schema = None;
    let mut config = None;
    let mut stats = Vec::new();
    while let Some((_, line)) = lines.peek() {
        let Some(comment) = line.strip_prefix('#') else { break };
        let comment = comment.trim();
        if let Some(s) = comment.strip_prefix("schema:") {
            schema = Some(s.trim().to_string());
        } else if let Some(c) = comment.strip_prefix("config:") {
            config = Some(serde_json::from_str(c.trim())?);
        } else if let Some(s) = comment.strip_prefix("stats:") {
            stats.push(serde_json::from_str(s.trim())?);
        }
        lines.next();
    }
    match schema {
        Some(s) if s == DATASET => {}
        other => {
            return Err(NsitError::SchemaMismatch {
                expected: DATASET.to_string(),
                found: other.unwrap_or_else(|| "<missing>".to_string()),
            })
        }
    }
    match lines.next() {
        Some((_, header)) if header.starts_with("label,dim") => {}
        _ => return Err(NsitError::Malformed("missing dataset column header".into())),
    }
    let mut examples = Vec::new();
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: &str| NsitError::Malformed(format!("line {}: {msg}", lineno + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 4 {
            return Err(bad("too few fields"));
        }
        let label = Label::from_u8(fields[0].parse().map_err(|_| bad("bad label"))?)?;
        let dim: usize = fields[1].parse().map_err(|_| bad("bad dim"))?;
        if dim < 2 {
            return Err(NsitError::InvalidDimension(dim));
        }
        let len = dim * (dim * dim - 1);
        if fields.len() != len + 4 {
            return Err(bad(&format!("expected {} fields, found {}", len + 4, fields.len())));
        }
        let numbers: Vec<f64> = fields[2..len + 3]
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| bad("bad number")))
            .collect::<Result<_>>()?;
        let seed: u64 = fields[len + 3].parse().map_err(|_| bad("bad seed"))?;
        let vector = ProbabilityVector::new(dim, numbers[..len].to_vec())?;
        vector.check_tuple_sums(1e-6)?;
        examples.push(LabeledExample {
            vector,
            label,
            gamma: numbers[len],
            seed,
        });
    }
    if examples.is_empty() {
        return Err(NsitError::EmptyInput("dataset rows"));
    }
    Ok(DatasetFile {
        config,
        stats,
        examples,
    })
}

/// Rows `t,p_1..p_M` under an `evolution-v1` header.
pub fn write_evolution<W: Write>(rows: &[(f64, ProbabilityVector)], out: &mut W) -> Result<()> {
    writeln!(out, "# schema: {EVOLUTION}")?;
    let len = rows.first().map_or(0, |(_, p)| p.as_slice().len());
    let columns: Vec<String> = (1..=len).map(|i| format!("p{i}")).collect();
    writeln!(out, "t,{}", columns.join(","))?;
    for (t, p) in rows {
        writeln!(out, "{},{}", fmt_sig(*t), join_sig(p.as_slice().iter().copied()))?;
    }
    Ok(())
}

/// Rows `bin_left,bin_right,count` under a `histogram-v1` header.
pub fn write_histogram<W: Write>(h: &GammaHistogram, out: &mut W) -> Result<()> {
    writeln!(out, "# schema: {HISTOGRAM}")?;
    writeln!(out, "# mean: {}", fmt_sig(h.mean))?;
    writeln!(out, "# total: {}", h.total)?;
    writeln!(out, "bin_left,bin_right,count")?;
    for (i, count) in h.counts.iter().enumerate() {
        writeln!(out, "{},{},{}", fmt_sig(h.edges[i]), fmt_sig(h.edges[i + 1]), count)?;
    }
    Ok(())
}

/// Comma-joined values at 10 significant digits.
pub fn csv_row(values: impl IntoIterator<Item = f64>) -> String {
    join_sig(values)
}
