//! `weyl-spectra`: command-line front end for curvature tensors, metric
//! families, Jordan-structure probes and the verification suite.
//!
//! Exit codes: `validate` 0 valid, 1 violation, 2 parse error; `probe` 0
//! holds, 1 fails, 3 inconclusive; `verify` 0 iff every job passes, else 1;
//! `explore` 0. Usage, parse and I/O errors exit with 2.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use weyl_spectra::curvature::{CurvatureTensor, SYMMETRY_TOL};
use weyl_spectra::explore::explore_conjectures;
use weyl_spectra::family::parse_family;
use weyl_spectra::geometry::{riemann_at, sample_points, MetricField};
use weyl_spectra::linalg::{CausalKind, Tolerances};
use weyl_spectra::probe::{conformal_probe, probe, Holds, ProbeConfig, Property};
use weyl_spectra::report::{jobs_csv, probe_report, records_csv, to_json, JobReport};
use weyl_spectra::tensor_io::{tensor_from_json, TensorFile};
use weyl_spectra::verify::{verify_theorems, JOB_IDS};
use weyl_spectra::{Error, Result};

#[derive(Parser)]
#[command(name = "weyl-spectra", version, about = "Weyl tensors, Jacobi and skew-symmetric curvature operators, and Jordan-structure probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the curvature symmetries of a tensor file
    Validate {
        #[arg(long, value_name = "FILE")]
        tensor: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Contractions and Weyl projection of a tensor file
    Tensor {
        #[arg(long, value_name = "FILE")]
        tensor: PathBuf,
        /// also report J(x) for this vector (comma separated)
        #[arg(long, value_name = "X", value_delimiter = ',', allow_hyphen_values = true)]
        vector: Option<Vec<f64>>,
        /// write only the Weyl projection, in the tensor file format
        #[arg(long)]
        project: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Metric, Christoffel symbols and curvature of a family at chart points
    Manifold {
        #[arg(long)]
        family: String,
        /// evaluate at this point (comma separated) instead of sampled points
        #[arg(long, value_name = "X", value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
        /// `frame` dumps everything; `weyl` and `riemann` write the tensor at
        /// the first point in the tensor file format
        #[arg(long, value_enum, default_value_t = Emit::Frame)]
        emit: Emit,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Decide the Osserman or Ivanov-Petrova property by sampling
    Probe {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = PropertyArg::Osserman)]
        property: PropertyArg,
        #[arg(long, value_enum, default_value_t = KindArg::Spacelike)]
        kind: KindArg,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the verification jobs
    Verify {
        /// run a single job
        #[arg(long, value_name = "JOB", value_parser = clap::builder::PossibleValuesParser::new(JOB_IDS))]
        only: Option<String>,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomized search over Weyl projections of single generators
    Explore {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[command(flatten)]
        probe: ProbeArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// built-in family, e.g. `gf:p=3,f=sum_sq` or `gF:s=2,f=quartic`
    #[arg(long)]
    family: Option<String>,
    /// tensor file
    #[arg(long, value_name = "FILE")]
    tensor: Option<PathBuf>,
}

#[derive(Args)]
struct ProbeArgs {
    /// chart points per family
    #[arg(long)]
    points: Option<usize>,
    /// unit vectors per point
    #[arg(long)]
    vectors: Option<usize>,
    /// oriented 2-planes per point
    #[arg(long)]
    planes: Option<usize>,
    /// decimal or 0x-prefixed hexadecimal
    #[arg(long, env = "WEYL_SPECTRA_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    /// relative rank threshold
    #[arg(long)]
    rank_tol: Option<f64>,
    /// eigenvalue clustering tolerance
    #[arg(long)]
    eig_tol: Option<f64>,
    /// half-width of the coordinate box for pseudo-sphere sampling
    #[arg(long = "box")]
    box_radius: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    /// write the report here instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Frame,
    Weyl,
    Riemann,
}

#[derive(Clone, Copy, ValueEnum)]
enum PropertyArg {
    Osserman,
    Ip,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Spacelike,
    Timelike,
}

impl From<PropertyArg> for Property {
    fn from(p: PropertyArg) -> Self {
        match p {
            PropertyArg::Osserman => Property::Osserman,
            PropertyArg::Ip => Property::Ip,
        }
    }
}

impl From<KindArg> for CausalKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Spacelike => CausalKind::Spacelike,
            KindArg::Timelike => CausalKind::Timelike,
        }
    }
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

impl ProbeArgs {
    fn config(&self) -> Result<ProbeConfig> {
        let d = ProbeConfig::default();
        let cfg = ProbeConfig {
            n_points: self.points.unwrap_or(d.n_points),
            n_vectors: self.vectors.unwrap_or(d.n_vectors),
            n_planes: self.planes.unwrap_or(d.n_planes),
            seed: self.seed.unwrap_or(d.seed),
            tol: Tolerances {
                rank_rel: self.rank_tol.unwrap_or(d.tol.rank_rel),
                eig: self.eig_tol.unwrap_or(d.tol.eig),
                ..d.tol
            },
            box_radius: self.box_radius.unwrap_or(d.box_radius),
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Everything goes through one writer: the `--out` file or standard output.
fn emit(output: &OutputArgs, text: &str) -> Result<()> {
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn read_tensor(path: &Path) -> Result<CurvatureTensor> {
    tensor_from_json(&fs::read_to_string(path)?)
}

fn components_csv(t: &CurvatureTensor) -> Result<String> {
    let rows: Vec<Vec<String>> = TensorFile::from_tensor(t)
        .components
        .iter()
        .map(|&(i, j, k, l, v)| vec![i.to_string(), j.to_string(), k.to_string(), l.to_string(), v.to_string()])
        .collect();
    weyl_spectra::report::csv_table(&["i", "j", "k", "l", "value"], &rows)
}

fn matrix_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn cmd_validate(tensor: &Path, output: &OutputArgs) -> Result<u8> {
    let t = read_tensor(tensor)?;
    let report = t.validate();
    let tol = SYMMETRY_TOL * t.max_abs().max(1.0);
    let mut r = JobReport::new(
        "validate",
        &format!("{} satisfies the curvature symmetries", tensor.display()),
        "definition: algebraic curvature tensor",
    );
    r.samples = t.components().len();
    r.at_most("pair_swap", report.pair_swap, tol);
    r.at_most("antisymmetry", report.antisymmetry, tol);
    r.at_most("bianchi", report.bianchi, tol);
    let text = match output.format {
        Format::Json => to_json(&r)?,
        Format::Csv => jobs_csv(std::slice::from_ref(&r))?,
    };
    emit(output, &text)?;
    Ok(if r.passed() { 0 } else { 1 })
}

fn cmd_tensor(tensor: &Path, vector: Option<&[f64]>, project: bool, output: &OutputArgs) -> Result<u8> {
    let t = read_tensor(tensor)?;
    let weyl = t.weyl_projection();
    if project {
        let text = match output.format {
            Format::Json => to_json(&TensorFile::from_tensor(&weyl))?,
            Format::Csv => components_csv(&weyl)?,
        };
        emit(output, &text)?;
        return Ok(0);
    }
    let mut doc = json!({
        "dim": t.dim(),
        "signature": [t.space().signature().p, t.space().signature().q],
        "symmetry": t.validate(),
        "ricci": matrix_rows(&t.ricci().matrix),
        "scalar_curvature": t.scalar_curvature(),
        "weyl_max_abs": weyl.max_abs(),
        "weyl": TensorFile::from_tensor(&weyl),
    });
    if let Some(x) = vector {
        let x = nalgebra::DVector::from_column_slice(x);
        let j = t.jacobi(&x)?;
        let jw = weyl.jacobi(&x)?;
        doc["jacobi"] = json!({ "x": x.as_slice(), "J_A": matrix_rows(&j.matrix), "trace_J_A": j.trace(),
                                "J_W": matrix_rows(&jw.matrix), "trace_J_W": jw.trace() });
    }
    let text = match output.format {
        Format::Json => to_json(&doc)?,
        Format::Csv => components_csv(&weyl)?,
    };
    emit(output, &text)?;
    Ok(0)
}

fn manifold_points(field: &MetricField, at: Option<&[f64]>, cfg: &ProbeConfig) -> Result<Vec<Vec<f64>>> {
    match at {
        Some(x) => {
            if x.len() != field.dim() {
                return Err(Error::DimensionMismatch { expected: field.dim(), found: x.len() });
            }
            Ok(vec![x.to_vec()])
        }
        None => Ok(sample_points(field, cfg.n_points, cfg.seed)?
            .into_iter()
            .map(|p| p.as_slice().to_vec())
            .collect()),
    }
}

fn cmd_manifold(family: &str, at: Option<&[f64]>, what: Emit, cfg: &ProbeConfig, output: &OutputArgs) -> Result<u8> {
    let field = parse_family(family)?;
    let points = manifold_points(&field, at, cfg)?;
    if what != Emit::Frame {
        let frame = riemann_at(&field, &points[0])?;
        let t = if what == Emit::Weyl { &frame.weyl } else { &frame.riemann };
        let text = match output.format {
            Format::Json => to_json(&TensorFile::from_tensor(t))?,
            Format::Csv => components_csv(t)?,
        };
        emit(output, &text)?;
        return Ok(0);
    }
    let mut frames = Vec::new();
    let mut rows = Vec::new();
    for (n, x) in points.iter().enumerate() {
        let f = riemann_at(&field, x)?;
        let m = field.dim();
        let mut christoffel = Vec::new();
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let v = f.christoffel.get(k, i, j);
                    if v != 0.0 {
                        christoffel.push(json!([k, i, j, v]));
                    }
                }
            }
        }
        rows.push(vec![
            n.to_string(),
            x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "),
            field.scale_at(x)?.to_string(),
            f.riemann.ricci().matrix.amax().to_string(),
            f.riemann.scalar_curvature().to_string(),
            f.riemann.max_abs().to_string(),
            f.weyl.max_abs().to_string(),
        ]);
        frames.push(json!({
            "point": x,
            "conformal_factor": field.scale_at(x)?,
            "gram": matrix_rows(f.gram()),
            "christoffel": christoffel,
            "ricci": matrix_rows(&f.riemann.ricci().matrix),
            "scalar_curvature": f.riemann.scalar_curvature(),
            "riemann": TensorFile::from_tensor(&f.riemann),
            "weyl": TensorFile::from_tensor(&f.weyl),
        }));
    }
    let text = match output.format {
        Format::Json => to_json(&json!({ "family": field.to_string(), "dim": field.dim(),
            "signature": [field.signature().p, field.signature().q], "frames": frames }))?,
        Format::Csv => weyl_spectra::report::csv_table(
            &["point", "coordinates", "conformal_factor", "ricci_max_abs", "scalar_curvature", "riemann_max_abs", "weyl_max_abs"],
            &rows,
        )?,
    };
    emit(output, &text)?;
    Ok(0)
}

fn cmd_probe(source: &Source, property: Property, kind: CausalKind, cfg: &ProbeConfig, output: &OutputArgs) -> Result<u8> {
    let (label, verdict, points) = match (&source.family, &source.tensor) {
        (Some(family), _) => {
            let field = parse_family(family)?;
            let verdict = conformal_probe(&field, property, kind, cfg)?;
            let points = sample_points(&field, cfg.n_points, cfg.seed)?
                .into_iter()
                .map(|p| Some(p.as_slice().to_vec()))
                .collect();
            (format!("the Weyl tensor of {field}"), verdict, points)
        }
        (None, Some(path)) => {
            let t = read_tensor(path)?;
            (path.display().to_string(), probe(&t, property, kind, cfg)?, Vec::new())
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let text = match output.format {
        Format::Json => to_json(&probe_report(&label, &verdict, cfg))?,
        Format::Csv => records_csv(&verdict.records, &points)?,
    };
    emit(output, &text)?;
    Ok(match verdict.holds {
        Holds::True => 0,
        Holds::False => 1,
        Holds::Inconclusive => 3,
    })
}

fn suite_output(suite: &weyl_spectra::report::SuiteReport, output: &OutputArgs) -> Result<()> {
    let text = match output.format {
        Format::Json => to_json(suite)?,
        Format::Csv => jobs_csv(&suite.jobs)?,
    };
    emit(output, &text)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { tensor, output } => cmd_validate(&tensor, &output),
        Command::Tensor { tensor, vector, project, output } => cmd_tensor(&tensor, vector.as_deref(), project, &output),
        Command::Manifold { family, at, emit, probe, output } => {
            cmd_manifold(&family, at.as_deref(), emit, &probe.config()?, &output)
        }
        Command::Probe { source, property, kind, probe, output } => {
            cmd_probe(&source, property.into(), kind.into(), &probe.config()?, &output)
        }
        Command::Verify { only, probe, output } => {
            let suite = verify_theorems(&probe.config()?, only.as_deref())?;
            suite_output(&suite, &output)?;
            Ok(if suite.all_passed() { 0 } else { 1 })
        }
        Command::Explore { trials, probe, output } => {
            let suite = explore_conjectures(&probe.config()?, trials)?;
            suite_output(&suite, &output)?;
            // findings are data, never a failure
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
