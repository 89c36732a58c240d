//! The `bgph` command line.

pub mod document;
pub mod input;
pub mod svg;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bgph_core::complex::{critical_values, vietoris_rips};
use bgph_core::distances::bottleneck;
use bgph_core::harness::{perturb_points, run_property_suite, RandomModel};
use bgph_core::hochster::HochsterGroup;
use bgph_core::metric::{
    gromov_hausdorff_bijective_with_cap, gromov_hausdorff_with_cap, PseudoMetricSpace, GH_BIJECTIVE_CAP,
    GH_PAIR_CAP, TOLERANCE,
};
use bgph_core::{persistent_homology, phhz, phz, Barcode, Bigrade, Config, DoubleHomology, PrimeField};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::document::{sha256_hex, BarcodeDocument, Grading, Provenance};
use crate::input::{read_space, Input};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_FAIL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bgph", version, about = "Bigraded persistent homology of finite metric spaces")]
pub struct Cli {
    /// Worker threads (overrides BGPH_THREADS)
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute a barcode and write it as JSON (and optionally SVG)
    Barcode(BarcodeArgs),
    /// Distance between two barcode documents
    Distance(DistanceArgs),
    /// Gromov–Hausdorff distance between two spaces
    Gh(GhArgs),
    /// Check the stability inequality on a pair of spaces
    Stability(StabilityArgs),
    /// Run the randomized property suite
    Selftest(SelftestArgs),
    /// Bigraded Betti table (or double homology) of R(X, t) as CSV
    Betti(BettiArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ComputeOpts {
    /// Field characteristic
    #[arg(long, default_value_t = 2)]
    pub field: u32,
    /// Largest point count for subset enumeration
    #[arg(long, default_value_t = bgph_core::complex::DEFAULT_VERTEX_CAP)]
    pub max_vertices: usize,
}

impl ComputeOpts {
    fn config(&self) -> Result<Config> {
        Ok(Config::new(PrimeField::new(self.field)?, self.max_vertices)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ph,
    Phz,
    Phhz,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Ph => "ph",
            Mode::Phz => "phz",
            Mode::Phhz => "phhz",
        }
    }
}

#[derive(Args, Debug)]
pub struct BarcodeArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the input as a distance matrix
    #[arg(long)]
    pub matrix: bool,
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[command(flatten)]
    pub compute: ComputeOpts,
    /// JSON output path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistanceKind {
    Bottleneck,
    Interleaving,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "bottleneck")]
    pub kind: DistanceKind,
    /// Allow bars of different grades to be matched
    #[arg(long)]
    pub ungraded: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GhMode {
    Exact,
    Bijective,
}

#[derive(Args, Debug)]
pub struct GhArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: GhMode,
    /// Treat both inputs as distance matrices
    #[arg(long)]
    pub matrix: bool,
    /// Size cap: |A|·|B| for exact, |A| for bijective
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StabilityMode {
    Phz,
    Phhz,
}

#[derive(Args, Debug)]
pub struct StabilityArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, value_enum, default_value = "phhz")]
    pub mode: StabilityMode,
    #[arg(long)]
    pub matrix: bool,
    #[command(flatten)]
    pub compute: ComputeOpts,
    /// Extra pairs: A against seeded perturbations of A (coordinate input only)
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Largest displacement of a point in a perturbation
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub max_points: usize,
    #[arg(long, default_value_t = 0.2)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct BettiArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub matrix: bool,
    /// Filtration parameter
    #[arg(long)]
    pub t: f64,
    /// Report double homology instead of bigraded Betti numbers
    #[arg(long)]
    pub double: bool,
    #[command(flatten)]
    pub compute: ComputeOpts,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for an error: caps map to 2, everything else to 1.
pub fn exit_code_for(err: &anyhow::Error) -> i32 {
    let capped = err.chain().any(|cause| {
        matches!(
            cause.downcast_ref::<bgph_core::Error>(),
            Some(bgph_core::Error::CapExceeded { .. })
        )
    });
    if capped {
        EXIT_CAP
    } else {
        EXIT_USAGE
    }
}

fn configure_threads(cli_threads: Option<usize>) -> Result<()> {
    let env = std::env::var("BGPH_THREADS").ok();
    let threads = match (cli_threads, env) {
        (Some(n), _) => Some(n),
        (None, Some(v)) => Some(
            v.trim()
                .parse::<usize>()
                .with_context(|| format!("BGPH_THREADS={v:?} is not a thread count"))?,
        ),
        (None, None) => None,
    };
    if let Some(n) = threads {
        // a pool built earlier in the same process is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn compute_barcode(space: &PseudoMetricSpace, mode: Mode, config: &Config) -> Result<Barcode> {
    Ok(match mode {
        Mode::Ph => persistent_homology(space, config)?,
        Mode::Phz => phz(space, config)?,
        Mode::Phhz => phhz(space, config)?,
    })
}

pub fn barcode_document(input: &Input, matrix: bool, mode: Mode, config: &Config) -> Result<BarcodeDocument> {
    let barcode = compute_barcode(&input.space, mode, config)?;
    let grading = if mode == Mode::Ph { Grading::Degree } else { Grading::Bigraded };
    let provenance = Provenance {
        input_sha256: sha256_hex(&input.bytes),
        input_format: if matrix { "matrix" } else { "coordinates" }.into(),
        points: input.space.len(),
        mode: mode.name().into(),
        field: config.field.characteristic(),
        max_vertices: config.max_vertices,
        tolerance: TOLERANCE,
    };
    Ok(BarcodeDocument::new(
        grading,
        critical_values(&input.space).values().to_vec(),
        &barcode,
        provenance,
    ))
}

fn cmd_barcode(args: &BarcodeArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.compute.config()?;
    let input = read_space(&args.input, args.matrix)?;
    let doc = barcode_document(&input, args.matrix, args.mode, &config)?;
    write_output(args.out.as_deref(), &doc.to_json(), out)?;
    if let Some(path) = &args.svg {
        fs::write(path, svg::render(&doc)).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(EXIT_OK)
}

fn read_document(path: &Path) -> Result<BarcodeDocument> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    BarcodeDocument::from_json(&text).with_context(|| format!("{}: invalid barcode document", path.display()))
}

fn cmd_distance(args: &DistanceArgs, out: &mut dyn Write) -> Result<i32> {
    let a = read_document(&args.a)?;
    let b = read_document(&args.b)?;
    if a.grading != b.grading {
        bail!("cannot compare a {:?} barcode with a {:?} barcode", a.grading, b.grading);
    }
    // both kinds agree by the isometry theorem; the flag only names the quantity
    let d = bottleneck(&a.barcode()?, &b.barcode()?, !args.ungraded);
    writeln!(out, "{d}")?;
    Ok(EXIT_OK)
}

fn cmd_gh(args: &GhArgs, out: &mut dyn Write) -> Result<i32> {
    let a = read_space(&args.a, args.matrix)?.space;
    let b = read_space(&args.b, args.matrix)?.space;
    let d = match args.mode {
        GhMode::Exact => gromov_hausdorff_with_cap(&a, &b, args.cap.unwrap_or(GH_PAIR_CAP))?.0,
        GhMode::Bijective => gromov_hausdorff_bijective_with_cap(&a, &b, args.cap.unwrap_or(GH_BIJECTIVE_CAP))?.0,
    };
    writeln!(out, "{d}")?;
    Ok(EXIT_OK)
}

struct StabilityLine {
    label: String,
    left: f64,
    right: f64,
}

fn stability_pair(
    label: String,
    x: &PseudoMetricSpace,
    y: &PseudoMetricSpace,
    mode: StabilityMode,
    config: &Config,
) -> Result<StabilityLine> {
    let (left, gh) = match mode {
        StabilityMode::Phz => {
            if x.len() != y.len() {
                bail!("phz stability compares spaces of equal size (got {} and {})", x.len(), y.len());
            }
            let gh = gromov_hausdorff_bijective_with_cap(x, y, GH_BIJECTIVE_CAP)?.0;
            (bottleneck(&phz(x, config)?, &phz(y, config)?, true), gh)
        }
        StabilityMode::Phhz => {
            let gh = gromov_hausdorff_with_cap(x, y, GH_PAIR_CAP)?.0;
            (bottleneck(&phhz(x, config)?, &phhz(y, config)?, true), gh)
        }
    };
    Ok(StabilityLine {
        label,
        left,
        right: 2.0 * gh,
    })
}

fn cmd_stability(args: &StabilityArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.compute.config()?;
    let a = read_space(&args.a, args.matrix)?;
    let b = read_space(&args.b, args.matrix)?;
    let distance = match args.mode {
        StabilityMode::Phz => "d'_GH",
        StabilityMode::Phhz => "d_GH",
    };
    if args.trials > 0 && a.points.is_none() {
        bail!("--trials perturbs coordinates and needs coordinate input");
    }
    let mut lines = vec![stability_pair("a vs b".into(), &a.space, &b.space, args.mode, &config)?];
    if let Some(points) = a.points.as_ref().filter(|_| args.trials > 0) {
        for t in 0..args.trials {
            let seed = args.seed.wrapping_add(t as u64);
            let moved = PseudoMetricSpace::from_points(&perturb_points(points, args.epsilon, seed))?;
            lines.push(stability_pair(format!("a vs perturbed a (seed {seed})"), &a.space, &moved, args.mode, &config)?);
        }
    }
    let mut failures = 0;
    for l in &lines {
        let pass = l.left <= l.right + TOLERANCE;
        if !pass {
            failures += 1;
        }
        writeln!(
            out,
            "{} {}: W = {} <= 2 {distance} = {}",
            if pass { "PASS" } else { "FAIL" },
            l.label,
            l.left,
            l.right
        )?;
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_selftest(args: &SelftestArgs, out: &mut dyn Write) -> Result<i32> {
    let model = RandomModel {
        seed: args.seed,
        max_points: args.max_points,
        epsilon: args.epsilon,
        ..RandomModel::default()
    };
    if model.max_points < model.min_points {
        bail!("--max-points must be at least {}", model.min_points);
    }
    let report = run_property_suite(&model, args.trials);
    write!(out, "{report}")?;
    writeln!(
        out,
        "{} trials, {} failures",
        report.trials.len(),
        report.failures().len()
    )?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_FAIL })
}

/// CSV with one row per `-i` and one column per `2j`.
pub fn betti_csv(table: &std::collections::BTreeMap<Bigrade, usize>, m: usize) -> String {
    let mut s = String::from("-i");
    for j in 0..=m {
        s.push_str(&format!(",{}", 2 * j));
    }
    s.push('\n');
    for i in 0..=m {
        s.push_str(&format!("{}", -(i as i64)));
        for j in 0..=m {
            let v = table.get(&Bigrade::new(i, j)).copied().unwrap_or(0);
            s.push_str(&format!(",{v}"));
        }
        s.push('\n');
    }
    s
}

fn cmd_betti(args: &BettiArgs, out: &mut dyn Write) -> Result<i32> {
    let config = args.compute.config()?;
    let input = read_space(&args.input, args.matrix)?;
    let k = vietoris_rips(&input.space, args.t)?;
    let group = HochsterGroup::new(&k, &config)?;
    let table = if args.double {
        DoubleHomology::from_group(group)?.dims()
    } else {
        group.betti_table()
    };
    write_output(args.out.as_deref(), &betti_csv(&table, input.space.len()), out)?;
    Ok(EXIT_OK)
}

/// Runs a parsed command line, writing results to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    configure_threads(cli.threads)?;
    match &cli.command {
        Command::Barcode(a) => cmd_barcode(a, out),
        Command::Distance(a) => cmd_distance(a, out),
        Command::Gh(a) => cmd_gh(a, out),
        Command::Stability(a) => cmd_stability(a, out),
        Command::Selftest(a) => cmd_selftest(a, out),
        Command::Betti(a) => cmd_betti(a, out),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(text.as_bytes());
            } else {
                let _ = err.write_all(text.as_bytes());
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code_for(&e)
        }
    }
}
