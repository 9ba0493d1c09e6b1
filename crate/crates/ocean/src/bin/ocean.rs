use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ocean::results::{Format, Metric, ScanRequest};
use ocean::{selftest, statefile, Delimiter, Orientation, SetSpec};
use ocean_core::{prepare, Alpha, BranchOptions, DEFAULT_MAX_ITER};

/// Simultaneous true discovery proportion bounds for two-way feature sets of
/// omics association matrices.
#[derive(Parser)]
#[command(name = "ocean", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the association matrix, h and p-categories, and write a state file.
    Prep(PrepArgs),
    /// Bound pair, row and column TDPs for one or all pairs of feature sets.
    Tdp(TdpArgs),
    /// Render a clustered SVG heatmap from a result table.
    Heatmap(HeatmapArgs),
    /// Run built-in consistency checks.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct PrepArgs {
    /// First omics dataset (matrix rows).
    #[arg(long, requires = "omic_b", conflicts_with = "pvalues")]
    omic_a: Option<PathBuf>,
    /// Second omics dataset (matrix columns).
    #[arg(long, requires = "omic_a")]
    omic_b: Option<PathBuf>,
    /// Precomputed p-value matrix instead of two datasets.
    #[arg(long, required_unless_present = "omic_a")]
    pvalues: Option<PathBuf>,
    /// Input files list features in rows and samples in columns.
    #[arg(long)]
    features_in_rows: bool,
    /// Field separator; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    delimiter: Option<Delimiter>,
    #[arg(long, default_value_t = 0.05, value_parser = parse_alpha)]
    alpha: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TdpArgs {
    #[arg(long)]
    state: PathBuf,
    /// GMT collection of row (first omic) feature sets.
    #[arg(long)]
    row_sets: Option<PathBuf>,
    /// GMT collection of column (second omic) feature sets.
    #[arg(long)]
    col_sets: Option<PathBuf>,
    /// Single row set by name; all sets are scanned when omitted.
    #[arg(long, conflicts_with = "row_ids")]
    row_set: Option<String>,
    /// Single column set by name; all sets are scanned when omitted.
    #[arg(long, conflicts_with = "col_ids")]
    col_set: Option<String>,
    /// Comma-separated row feature ids.
    #[arg(long, value_delimiter = ',')]
    row_ids: Option<Vec<String>>,
    /// Comma-separated column feature ids.
    #[arg(long, value_delimiter = ',')]
    col_ids: Option<Vec<String>>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    max_iter: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    results: PathBuf,
    #[arg(long, value_enum)]
    metric: Metric,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Adds larger oracle suites and the null FWER simulation.
    #[arg(long)]
    full: bool,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Also verify that this state file loads.
    #[arg(long)]
    state: Option<PathBuf>,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    Alpha::new(v).map(Alpha::get).map_err(|e| e.to_string())
}

fn delimiter_for(path: &Path, explicit: Option<Delimiter>) -> Delimiter {
    explicit.unwrap_or_else(|| Delimiter::from_path(path))
}

fn cmd_prep(args: PrepArgs) -> anyhow::Result<()> {
    let start = Instant::now();
    let alpha = Alpha::new(args.alpha)?;
    let orientation = if args.features_in_rows {
        Orientation::FeaturesInRows
    } else {
        Orientation::SamplesInRows
    };
    let matrix = match (&args.omic_a, &args.omic_b, &args.pvalues) {
        (Some(a), Some(b), None) => {
            let da = ocean::parse_matrix(a, delimiter_for(a, args.delimiter), orientation)?;
            let db = ocean::parse_matrix(b, delimiter_for(b, args.delimiter), orientation)?;
            let built = ocean::build_pvalue_matrix(&da, &db)?;
            if built.reordered {
                log::info!(
                    "reordered samples of {} to match {}",
                    b.display(),
                    a.display()
                );
            }
            built.matrix
        }
        (None, None, Some(p)) => ocean::parse_pvalue_matrix(p, delimiter_for(p, args.delimiter))?,
        _ => bail!("give either --omic-a and --omic-b, or --pvalues"),
    };
    let state = prepare(&matrix, alpha)?;
    drop(matrix);
    statefile::save(&state, &args.out)?;
    println!(
        "p={} q={} m={} h={} cap={} alpha={} elapsed={:.3}s",
        state.rows(),
        state.cols(),
        state.h().m(),
        state.h().h(),
        state.cap(),
        alpha.get(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn cmd_tdp(args: TdpArgs) -> anyhow::Result<()> {
    let state = statefile::load(&args.state)?;
    let row_sets = args.row_sets.as_deref().map(ocean::parse_gmt).transpose()?;
    let col_sets = args.col_sets.as_deref().map(ocean::parse_gmt).transpose()?;
    let spec = |name: Option<String>, ids: Option<Vec<String>>| match (name, ids) {
        (Some(n), _) => Some(SetSpec::Named(n)),
        (None, Some(ids)) => Some(SetSpec::Ids(ids)),
        (None, None) => None,
    };
    let request = ScanRequest {
        row_set: spec(args.row_set, args.row_ids),
        col_set: spec(args.col_set, args.col_ids),
        row_sets: row_sets.as_ref(),
        col_sets: col_sets.as_ref(),
    };
    let options = BranchOptions::with_max_iter(args.max_iter);
    let out: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut writer = ocean::ResultWriter::new(out, args.format);
    let rows = ocean::scan(&state, &request, &options, &mut writer)?;
    writer.flush()?;
    log::info!("wrote {rows} result rows");
    Ok(())
}

fn cmd_heatmap(args: HeatmapArgs) -> anyhow::Result<()> {
    let file =
        File::open(&args.results).with_context(|| format!("opening {}", args.results.display()))?;
    let results = ocean::read_results(file, &args.results.display().to_string())?;
    let map = ocean::build_heatmap(&results, args.metric)?;
    let svg = ocean::render_svg(&map, args.metric);
    std::fs::write(&args.out, svg).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn cmd_selftest(args: SelftestArgs) -> anyhow::Result<bool> {
    let mode = if args.full {
        selftest::Mode::Full
    } else {
        selftest::Mode::Quick
    };
    let report = selftest::run(mode, args.seed, args.state.as_deref());
    println!("{report}");
    Ok(report.passed())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ocean::Error>() {
        Some(e) => e.exit_code() as u8,
        None if err.downcast_ref::<ocean_core::Error>().is_some() => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = ocean::init_thread_pool() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let result = match cli.command {
        Command::Prep(a) => cmd_prep(a),
        Command::Tdp(a) => cmd_tdp(a),
        Command::Heatmap(a) => cmd_heatmap(a),
        Command::Selftest(a) => match cmd_selftest(a) {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
