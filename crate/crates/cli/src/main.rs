//! `nsit`: command-line front end for the nsit-core pipeline.
//!
//! Exit status is 0 on success, 2 when the arguments or input files are
//! invalid and 1 when a computation or write fails. Generator and outcome
//! indices are 1-based on the command line and in files.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nsit_core::classical::{
    coarse_grain, evolve_ensemble, nsit_residual, sample_ensemble, Axis, SpinDistribution,
};
use nsit_core::classifier::{evaluate, predict, train_detailed, FeatureMap, TrainConfig};
use nsit_core::datagen::{gamma_histogram, generate_dataset, sample_bloch_points, GenerationConfig};
use nsit_core::dynamics::{evolve_probabilities, transfer_matrix, HamiltonianSpec};
use nsit_core::measurement::{
    collapse, negativity_scan, reconstruct_pseudodensity, witness_gamma, MeasurementRecord,
};
use nsit_core::qubit::QubitWitnessSet;
use nsit_core::schema::{self, fmt_sig};
use nsit_core::states::{density_from_bloch, probability_vector_from_density, BlochVector};
use nsit_core::{build_basis, GeneratorBasis, NsitError, ProbabilityVector};

#[derive(Debug)]
enum CliError {
    Validation(String),
    Runtime(String),
}

impl From<NsitError> for CliError {
    fn from(e: NsitError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Parser)]
#[command(name = "nsit", version, about = "Probability-vector dynamics and NSIT witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the scaled generalized Gell-Mann basis (ggmmb-v1).
    Basis {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve a probability vector under a Hamiltonian.
    Evolve(EvolveArgs),
    /// Collapse one probability tuple onto a measurement outcome.
    Measure(MeasureArgs),
    /// Compute the witness γ for a state and a measurement.
    Witness(WitnessArgs),
    /// Collapse, then scan the evolved vector for negative components.
    Scan(ScanArgs),
    /// Closed-form qubit witnesses and Δ over a Bloch-ball grid.
    QubitDelta(QubitDeltaArgs),
    /// Monte Carlo NSIT check for a classical spin ensemble.
    ClassicalCheck(ClassicalArgs),
    /// Generate a labeled dataset (dataset-v1).
    Datagen(DatagenArgs),
    /// Histogram of γ over the violating rows of a dataset.
    HistGamma {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample qubit Bloch points inside and outside the unit ball.
    SampleBloch {
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train a logistic-regression classifier on a dataset.
    Train(TrainArgs),
    /// Label a probability vector or every row of a dataset.
    Classify {
        #[arg(long)]
        model: PathBuf,
        /// A pvec-v1 file or a dataset-v1 table.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy, precision and recall of a model on a labeled dataset.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        /// Normal quantile for the accuracy lower bound.
        #[arg(long, default_value_t = 2.326)]
        z: f64,
    },
}

/// State source: a rho-v1 or pvec-v1 file, or Bloch coordinates.
#[derive(Args)]
struct StateArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, conflicts_with = "bloch")]
    state: Option<PathBuf>,
    /// Comma-separated Bloch coordinates ⟨λ_n⟩.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    bloch: Option<Vec<f64>>,
}

impl StateArgs {
    fn load(&self, basis: &GeneratorBasis) -> CliResult<ProbabilityVector> {
        let p = match (&self.state, &self.bloch) {
            (Some(path), _) => {
                let text = read_input(path)?;
                match schema::schema_of(&text).as_deref() {
                    Some(schema::RHO) => {
                        probability_vector_from_density(&schema::read_density(&text)?, basis)?
                    }
                    Some(schema::PVEC) => schema::read_probability_vector(&text)?,
                    other => {
                        return Err(invalid(format!(
                            "{}: expected a {} or {} document, found {}",
                            path.display(),
                            schema::RHO,
                            schema::PVEC,
                            other.unwrap_or("no schema")
                        )))
                    }
                }
            }
            (None, Some(coords)) => {
                let v = BlochVector::new(self.dim, coords.clone())?;
                probability_vector_from_density(&density_from_bloch(&v, basis)?, basis)?
            }
            (None, None) => return Err(invalid("one of --state or --bloch is required")),
        };
        if p.dim() != self.dim {
            return Err(NsitError::DimensionMismatch {
                expected: self.dim,
                actual: p.dim(),
            }
            .into());
        }
        Ok(p)
    }
}

/// Measurement choice: `--measure x|y|z` with `--outcome ±1` for a qubit, or
/// a 1-based `--generator` with `--outcome-index`.
#[derive(Args)]
struct RecordArgs {
    #[arg(long, conflicts_with = "generator")]
    measure: Option<String>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true, requires = "measure")]
    outcome: i8,
    #[arg(long)]
    generator: Option<usize>,
    #[arg(long, default_value_t = 1, requires = "generator")]
    outcome_index: usize,
}

impl RecordArgs {
    fn record(&self, dim: usize) -> CliResult<MeasurementRecord> {
        let m = match (&self.measure, self.generator) {
            (Some(axis), _) => {
                if dim != 2 {
                    return Err(invalid("--measure is only defined for --dim 2; use --generator"));
                }
                let axis: Axis = axis.parse()?;
                let k = match self.outcome {
                    1 => 0,
                    -1 => 1,
                    other => return Err(invalid(format!("--outcome must be +1 or -1, got {other}"))),
                };
                MeasurementRecord::new(axis.index(), k)
            }
            (None, Some(n)) => {
                if n == 0 || self.outcome_index == 0 {
                    return Err(invalid("--generator and --outcome-index are 1-based"));
                }
                MeasurementRecord::new(n - 1, self.outcome_index - 1)
            }
            (None, None) => return Err(invalid("one of --measure or --generator is required")),
        };
        m.validate(dim)?;
        Ok(m)
    }
}

/// Hamiltonian: a ham-v1 file, or a qubit field `H = B·σ/2`.
#[derive(Args)]
struct HamiltonianArgs {
    #[arg(long, conflicts_with_all = ["bx", "by", "bz"])]
    hamiltonian: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    bx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    by: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    bz: Option<f64>,
}

impl HamiltonianArgs {
    fn field(&self) -> [f64; 3] {
        [self.bx, self.by, self.bz].map(|b| b.unwrap_or(0.0))
    }

    fn load(&self, dim: usize) -> CliResult<HamiltonianSpec> {
        let h = match &self.hamiltonian {
            Some(path) => schema::read_hamiltonian(&read_input(path)?)?,
            None if dim == 2 => HamiltonianSpec::qubit_field(self.field())?,
            None => return Err(invalid("--hamiltonian is required unless --dim 2")),
        };
        if h.dim() != dim {
            return Err(NsitError::DimensionMismatch {
                expected: dim,
                actual: h.dim(),
            }
            .into());
        }
        Ok(h)
    }
}

/// Uniform grid `0, t_end/steps, ..., t_end`.
#[derive(Args)]
struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    t_end: f64,
    #[arg(long, default_value_t = 1000)]
    steps: usize,
}

impl GridArgs {
    fn grid(&self) -> CliResult<Vec<f64>> {
        if !self.t_end.is_finite() || self.t_end < 0.0 {
            return Err(invalid("--t-end must be finite and non-negative"));
        }
        if self.steps == 0 {
            return Err(invalid("--steps must be at least 1"));
        }
        Ok((0..=self.steps)
            .map(|i| self.t_end * i as f64 / self.steps as f64)
            .collect())
    }
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    hamiltonian: HamiltonianArgs,
    /// Single time; writes a pvec-v1 document.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "t_end")]
    t: Option<f64>,
    /// Final time of a trajectory; writes evolution-v1 rows.
    #[arg(long, allow_negative_numbers = true)]
    t_end: Option<f64>,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Also write the transfer matrix (tmat-v1).
    #[arg(long)]
    tmat_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    record: RecordArgs,
    /// Also write the reconstructed pseudodensity matrix (rho-v1).
    #[arg(long)]
    rho_out: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    record: RecordArgs,
    /// Write the full report (witness-v1).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    state: StateArgs,
    #[command(flatten)]
    record: RecordArgs,
    #[command(flatten)]
    hamiltonian: HamiltonianArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QubitDeltaArgs {
    /// Points per axis of the cube grid over [-1, 1]; points outside the
    /// ball are skipped.
    #[arg(long, default_value_t = 11, conflicts_with = "bloch")]
    grid: usize,
    /// A single Bloch point instead of a grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    bloch: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassicalArgs {
    /// `uniform-on-sphere[:r]`, `isotropic-gaussian[:sigma]` or `point-mass:x,y,z`.
    #[arg(long, default_value = "uniform-on-sphere")]
    distribution: String,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    hamiltonian: HamiltonianArgs,
    /// Axis measured at t = 0.
    #[arg(long, default_value = "x")]
    axis: String,
    /// Spin component compared at time t.
    #[arg(long, default_value = "z")]
    observe: String,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DatagenArgs {
    #[arg(long)]
    dim: usize,
    /// Total rows; the conforming class receives the extra row when odd.
    #[arg(long)]
    count: usize,
    #[arg(long)]
    seed: u64,
    /// Interval of the raw violating spectrum entries.
    #[arg(long, allow_negative_numbers = true, default_value_t = -0.5)]
    low: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    high: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    input: PathBuf,
    /// Seeds the train/validation split.
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    epochs: usize,
    #[arg(long, default_value_t = 1.0)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0.2)]
    validation_fraction: f64,
    /// `linear` or `quadratic`.
    #[arg(long, default_value = "quadratic")]
    features: String,
    #[arg(long)]
    out: PathBuf,
}

fn read_input(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, text: &str) -> CliResult<()> {
    let result = match out {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| CliError::Runtime(format!("write failed: {e}")))
}

fn csv_output(out: Option<&Path>, f: impl FnOnce(&mut Vec<u8>) -> nsit_core::Result<()>) -> CliResult<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    write_output(out, &String::from_utf8(buf).expect("formatted output is UTF-8"))
}

fn evolve(args: &EvolveArgs) -> CliResult<()> {
    let dim = args.state.dim;
    let basis = build_basis(dim)?;
    let p0 = args.state.load(&basis)?;
    let tm = transfer_matrix(&args.hamiltonian.load(dim)?, &basis)?;
    if let Some(path) = &args.tmat_out {
        write_output(Some(path), &schema::write_transfer_matrix(&tm)?)?;
    }
    match (args.t, args.t_end) {
        (Some(t), None) => {
            let p = evolve_probabilities(&p0, &tm, t)?;
            write_output(args.out.as_deref(), &schema::write_probability_vector(&p)?)
        }
        (None, Some(t_end)) => {
            let grid = GridArgs {
                t_end,
                steps: args.steps,
            }
            .grid()?;
            let rows = grid
                .iter()
                .map(|&t| Ok((t, evolve_probabilities(&p0, &tm, t)?)))
                .collect::<nsit_core::Result<Vec<_>>>()?;
            csv_output(args.out.as_deref(), |w| schema::write_evolution(&rows, w))
        }
        _ => Err(invalid("one of --t or --t-end is required")),
    }
}

fn measure(args: &MeasureArgs) -> CliResult<()> {
    let basis = build_basis(args.state.dim)?;
    let p = args.state.load(&basis)?;
    let post = collapse(&p, args.record.record(args.state.dim)?)?;
    if let Some(path) = &args.rho_out {
        let rho = reconstruct_pseudodensity(&post, &basis)?;
        write_output(Some(path), &schema::write_density(&rho)?)?;
    }
    write_output(args.out.as_deref(), &schema::write_probability_vector(&post)?)
}

fn witness(args: &WitnessArgs) -> CliResult<()> {
    let basis = build_basis(args.state.dim)?;
    let p = args.state.load(&basis)?;
    let report = witness_gamma(&p, args.record.record(args.state.dim)?, &basis)?;
    if let Some(path) = &args.out {
        let file = schema::WitnessFile::new(args.state.dim, &report, None);
        write_output(Some(path), &schema::write_witness(&file)?)?;
    }
    write_output(None, &format!("gamma = {}\n", fmt_sig(report.gamma)))
}

fn scan(args: &ScanArgs) -> CliResult<()> {
    let dim = args.state.dim;
    let basis = build_basis(dim)?;
    let p = args.state.load(&basis)?;
    let m = args.record.record(dim)?;
    let tm = transfer_matrix(&args.hamiltonian.load(dim)?, &basis)?;
    let grid = args.grid.grid()?;
    let report = witness_gamma(&p, m, &basis)?;
    let scan = negativity_scan(&collapse(&p, m)?, &tm, &grid)?;
    let mut text = format!(
        "gamma = {}\nviolating = {}\nmin_value = {}\n",
        fmt_sig(report.gamma),
        scan.violating,
        fmt_sig(scan.min_value)
    );
    if let Some(c) = scan.first_negative {
        text += &format!(
            "first_negative = t {} generator {} outcome {} value {}\n",
            fmt_sig(c.t),
            c.n + 1,
            c.k + 1,
            fmt_sig(c.value)
        );
    }
    if let Some(t) = scan.crossing_time {
        text += &format!("crossing_time = {}\n", fmt_sig(t));
    }
    if let Some(path) = &args.out {
        let file = schema::WitnessFile::new(dim, &report, Some(scan));
        write_output(Some(path), &schema::write_witness(&file)?)?;
    }
    write_output(None, &text)
}

fn qubit_delta(args: &QubitDeltaArgs) -> CliResult<()> {
    let points: Vec<[f64; 3]> = match &args.bloch {
        Some(b) => match b.as_slice() {
            &[x, y, z] => vec![[x, y, z]],
            _ => return Err(invalid("--bloch needs three components for a qubit")),
        },
        None => {
            if args.grid < 2 {
                return Err(invalid("--grid must be at least 2"));
            }
            let axis: Vec<f64> = (0..args.grid)
                .map(|i| -1.0 + 2.0 * i as f64 / (args.grid - 1) as f64)
                .collect();
            let mut points = Vec::new();
            for &x in &axis {
                for &y in &axis {
                    for &z in &axis {
                        if x * x + y * y + z * z <= 1.0 {
                            points.push([x, y, z]);
                        }
                    }
                }
            }
            points
        }
    };
    let mut text = String::from("# schema: qubit-delta-v1\nbx,by,bz,gamma_x,gamma_y,gamma_z,delta,bound_lhs\n");
    for b in points {
        let w = QubitWitnessSet::from_bloch(b)?;
        let row = b
            .into_iter()
            .chain(w.gammas())
            .chain([w.delta, w.bound().lhs]);
        text += &schema::csv_row(row);
        text.push('\n');
    }
    write_output(args.out.as_deref(), &text)
}

fn classical_check(args: &ClassicalArgs) -> CliResult<()> {
    let dist: SpinDistribution = args.distribution.parse()?;
    let axis: Axis = args.axis.parse()?;
    let observe: Axis = args.observe.parse()?;
    let field = args.hamiltonian.field();
    if args.hamiltonian.hamiltonian.is_some() {
        return Err(invalid("classical-check takes a field (--bx/--by/--bz), not --hamiltonian"));
    }
    let grid = args.grid.grid()?;
    let ensemble = sample_ensemble(dist, args.samples, args.seed)?;
    let mut text = format!(
        "# schema: classical-v1\n# distribution: {dist}\n# samples: {}\n# seed: {}\n# measured: {}\n# observed: {}\n",
        args.samples,
        args.seed,
        axis.label(),
        observe.label()
    );
    text += "t,px_plus,px_minus,py_plus,py_minus,pz_plus,pz_minus,residual,stderr\n";
    for &t in &grid {
        let marginals = coarse_grain(&evolve_ensemble(&ensemble, field, t)?);
        let r = nsit_residual(&ensemble, field, axis, t, |s| s[observe.index()])?;
        let row = std::iter::once(t)
            .chain(marginals.as_vector())
            .chain([r.residual, r.stderr]);
        text += &schema::csv_row(row);
        text.push('\n');
    }
    write_output(args.out.as_deref(), &text)
}

fn datagen(args: &DatagenArgs) -> CliResult<()> {
    if args.count == 0 {
        return Err(invalid("--count must be at least 1"));
    }
    let cfg = GenerationConfig {
        dim: args.dim,
        conforming: args.count - args.count / 2,
        violating: args.count / 2,
        seed: args.seed,
        violating_low: args.low,
        violating_high: args.high,
    };
    let dataset = generate_dataset(&cfg)?;
    for s in &dataset.stats {
        eprintln!(
            "class {}: {} accepted of {} attempts",
            s.label, s.accepted, s.attempts
        );
    }
    csv_output(args.out.as_deref(), |w| schema::write_dataset(&dataset, w))
}

fn hist_gamma(input: &Path, bins: usize, out: Option<&Path>) -> CliResult<()> {
    let data = schema::read_dataset(&read_input(input)?)?;
    let hist = gamma_histogram(&data.examples, bins)?;
    csv_output(out, |w| schema::write_histogram(&hist, w))
}

fn sample_bloch(count: usize, seed: u64, out: Option<&Path>) -> CliResult<()> {
    let sample = sample_bloch_points(count, seed)?;
    let mut text = String::from("# schema: bloch-sample-v1\nregion,bx,by,bz\n");
    for (region, points) in [("inside", &sample.inside), ("outside", &sample.outside)] {
        for p in points {
            text += &format!("{region},{}\n", schema::csv_row(*p));
        }
    }
    write_output(out, &text)
}

fn train(args: &TrainArgs) -> CliResult<()> {
    let data = schema::read_dataset(&read_input(&args.input)?)?;
    let features: FeatureMap = args.features.parse()?;
    let config = TrainConfig {
        epochs: args.epochs,
        learning_rate: args.learning_rate,
        seed: args.seed,
        validation_fraction: args.validation_fraction,
        features,
    };
    let run = train_detailed(&data.examples, &config)?;
    write_output(Some(&args.out), &schema::write_model(&run.model)?)?;
    let meta = &run.model.metadata;
    let mut text = format!(
        "train_examples = {}\nfinal_loss = {}\n",
        meta.train_examples,
        fmt_sig(meta.final_loss)
    );
    if let Some(acc) = meta.validation_accuracy {
        text += &format!("validation_accuracy = {}\n", fmt_sig(acc));
    }
    write_output(None, &text)
}

fn classify(model: &Path, input: &Path, out: Option<&Path>) -> CliResult<()> {
    let model = schema::read_model(&read_input(model)?)?;
    let text = read_input(input)?;
    if schema::schema_of(&text).as_deref() == Some(schema::PVEC) {
        let p = schema::read_probability_vector(&text)?;
        let pred = predict(&model, &p)?;
        return write_output(
            out,
            &format!("label = {}\nscore = {}\n", pred.label, fmt_sig(pred.score)),
        );
    }
    let data = schema::read_dataset(&text)?;
    let mut lines = String::from("# schema: predictions-v1\nrow,label,score\n");
    for (i, e) in data.examples.iter().enumerate() {
        let pred = predict(&model, &e.vector)?;
        lines += &format!("{},{},{}\n", i + 1, pred.label, fmt_sig(pred.score));
    }
    write_output(out, &lines)
}

fn evaluate_cmd(model: &Path, input: &Path, z: f64) -> CliResult<()> {
    let model = schema::read_model(&read_input(model)?)?;
    let data = schema::read_dataset(&read_input(input)?)?;
    let m = evaluate(&model, &data.examples)?;
    let text = format!(
        "examples = {}\naccuracy = {}\naccuracy_lower_bound = {}\nprecision = {}\nrecall = {}\n\
         true_positive = {}\nfalse_positive = {}\ntrue_negative = {}\nfalse_negative = {}\n",
        m.total(),
        fmt_sig(m.accuracy),
        fmt_sig(m.accuracy_lower_bound(z)),
        fmt_sig(m.precision),
        fmt_sig(m.recall),
        m.true_positive,
        m.false_positive,
        m.true_negative,
        m.false_negative
    );
    write_output(None, &text)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Basis { dim, out } => {
            let basis = build_basis(dim)?;
            write_output(out.as_deref(), &schema::write_basis(&basis)?)
        }
        Command::Evolve(args) => evolve(&args),
        Command::Measure(args) => measure(&args),
        Command::Witness(args) => witness(&args),
        Command::Scan(args) => scan(&args),
        Command::QubitDelta(args) => qubit_delta(&args),
        Command::ClassicalCheck(args) => classical_check(&args),
        Command::Datagen(args) => datagen(&args),
        Command::HistGamma { input, bins, out } => hist_gamma(&input, bins, out.as_deref()),
        Command::SampleBloch { count, seed, out } => sample_bloch(count, seed, out.as_deref()),
        Command::Train(args) => train(&args),
        Command::Classify { model, input, out } => classify(&model, &input, out.as_deref()),
        Command::Evaluate { model, input, z } => evaluate_cmd(&model, &input, z),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
