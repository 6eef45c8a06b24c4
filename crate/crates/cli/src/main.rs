use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cubetop_core::complex::Complex;
use cubetop_core::contraction::{self, RunOptions, TraceSummary, DEFAULT_MAX_STAGES};
use cubetop_core::experiment::{self, Check, Stat, SweepRow};
use cubetop_core::homology::{summarize, ChainComplex};
use cubetop_core::witness::{Embedding, WitnessComplex, WitnessName};
use cubetop_core::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cubetop", version, about = "Random 2-dimensional cubical complexes: sampling, contraction, homology and Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for trial-parallel commands (default: all cores)
    #[arg(long, global = true, env = "CUBETOP_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a complex and write it as a .qcx file
    Sample {
        #[command(flatten)]
        model: Model,
        #[arg(long)]
        out: PathBuf,
    },
    /// Face count, maximal and light edges, and beta1 of one complex
    Stats {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Run the parallel contraction on one complex
    Contract {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_MAX_STAGES)]
        max_stages: usize,
        #[command(flatten)]
        output: Output,
    },
    /// beta0, beta1 over F2, and torsion when the complex is small enough
    Homology {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// One statistic across a range of p
    Sweep(SweepArgs),
    /// Maximal-edge counts at p = (1 + (ln n + c)/n)/2
    Poisson {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 20_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Fixed-seed property checks; exits with 1 if any fails
    Verify {
        /// partition, edge-prob, gs, witness or soundness (all when omitted)
        #[arg(long)]
        check: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Export a witness complex as JSON, or as a .qcx embedded in Q^n
    Witness {
        /// torus, rp2 or klein
        #[arg(long)]
        name: String,
        /// Ambient dimension for the .qcx export (at least the witness's own)
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Model {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// A complex read from `--in`, or sampled from `--n/--p/--seed`.
#[derive(Args, Debug)]
struct Source {
    #[arg(long = "in", conflicts_with_all = ["n", "p"])]
    input: Option<PathBuf>,
    #[arg(long, requires = "p")]
    n: Option<u32>,
    #[arg(long, requires = "n")]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, conflicts_with_all = ["p_start", "p_end", "p_step"])]
    p: Option<f64>,
    #[arg(long, requires_all = ["p_end", "p_step"])]
    p_start: Option<f64>,
    #[arg(long)]
    p_end: Option<f64>,
    #[arg(long)]
    p_step: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// face-count, maximal-count, beta1, survivor-count, stage-count or vfix-full
    #[arg(long, default_value = "maximal-count")]
    stat: String,
    #[arg(long, default_value_t = DEFAULT_MAX_STAGES)]
    max_stages: usize,
    #[command(flatten)]
    output: Output,
}

fn load(source: &Source) -> Result<Complex, Error> {
    match (&source.input, source.n, source.p) {
        (Some(path), _, _) => Complex::read_qcx(BufReader::new(File::open(path)?)),
        (None, Some(n), Some(p)) => Complex::sample(n, p, source.seed),
        _ => Err(Error::Argument("give either --in FILE or --n and --p".into())),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json<T: Serialize>(value: &T, output: &Output) -> Result<(), Error> {
    let mut w = sink(output.out.as_deref())?;
    let text = serde_json::to_string_pretty(value).map_err(io::Error::from)?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(rows: &[T], path: Option<&Path>) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    for r in rows {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(io::Error::other(format!("{other:?}"))),
    }
}

/// Writes one record as JSON (default) or a single-row CSV.
fn emit<T: Serialize>(value: &T, output: &Output) -> Result<(), Error> {
    match output.format.unwrap_or(Format::Json) {
        Format::Json => write_json(value, output),
        Format::Csv => write_csv(std::slice::from_ref(value), output.out.as_deref()),
    }
}

#[derive(Serialize)]
struct SampleInfo<'a> {
    n: u32,
    p: f64,
    seed: u64,
    faces: usize,
    out: &'a Path,
}

#[derive(Serialize)]
struct HomologyRow {
    beta0: u64,
    beta1_f2: u64,
    torsion: String,
}

#[derive(Serialize)]
struct HistogramRow {
    k: usize,
    count: u64,
}

#[derive(Serialize)]
struct CheckRow<'a> {
    check: Check,
    name: &'a str,
    passed: bool,
    detail: &'a str,
}

fn sweep(args: &SweepArgs) -> Result<(), Error> {
    let stat: Stat = args.stat.parse()?;
    let ps = match (args.p, args.p_start, args.p_end, args.p_step) {
        (Some(p), ..) => experiment::p_range(p, p, 1.0)?,
        (None, Some(a), Some(b), Some(s)) => experiment::p_range(a, b, s)?,
        _ => return Err(Error::Argument("give --p or all of --p-start, --p-end, --p-step".into())),
    };
    let rows: Vec<SweepRow> = experiment::sweep(args.n, &ps, args.trials, args.seed, stat, args.max_stages)?;
    match args.output.format.unwrap_or(Format::Csv) {
        Format::Json => write_json(&rows, &args.output),
        Format::Csv => {
            write_csv(&rows, args.output.out.as_deref())?;
            if let Some(path) = &args.output.out {
                let script = experiment::plot_script(&path.to_string_lossy(), stat, args.n);
                let mut gp = path.clone().into_os_string();
                gp.push(".gp");
                std::fs::write(gp, script)?;
            }
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Argument("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Argument(e.to_string()))?;
    }
    match cli.command {
        Command::Sample { model, out } => {
            let c = Complex::sample(model.n, model.p, model.seed)?;
            let mut w = BufWriter::new(File::create(&out)?);
            c.write_qcx(&mut w)?;
            w.flush()?;
            let info = SampleInfo {
                n: c.n(),
                p: c.p(),
                seed: c.seed(),
                faces: c.face_count(),
                out: &out,
            };
            println!("{}", serde_json::to_string(&info).map_err(io::Error::from)?);
        }
        Command::Stats { source, output } => {
            emit(&experiment::stats_report(&load(&source)?), &output)?;
        }
        Command::Contract {
            source,
            max_stages,
            output,
        } => {
            let c = load(&source)?;
            let trace = contraction::run(
                &c,
                RunOptions {
                    max_stages,
                    keep_stages: false,
                },
            )?;
            let light = experiment::light_threshold(c.p()).unwrap_or(0);
            emit(&TraceSummary::new(&c, &trace, light), &output)?;
        }
        Command::Homology { source, output } => {
            let summary = summarize(&ChainComplex::from_complex(&load(&source)?))?;
            match output.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&summary, &output)?,
                Format::Csv => {
                    let torsion = summary.torsion.as_ref().map(|t| {
                        t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
                    });
                    let row = HomologyRow {
                        beta0: summary.beta0,
                        beta1_f2: summary.beta1_f2,
                        torsion: torsion.unwrap_or_else(|| "not computed".into()),
                    };
                    write_csv(&[row], output.out.as_deref())?;
                }
            }
        }
        Command::Sweep(args) => sweep(&args)?,
        Command::Poisson {
            n,
            c,
            trials,
            seed,
            output,
        } => {
            let report = experiment::poisson(n, c, trials, seed)?;
            match output.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&report, &output)?,
                Format::Csv => {
                    let rows: Vec<HistogramRow> = report
                        .histogram
                        .iter()
                        .enumerate()
                        .map(|(k, &count)| HistogramRow { k, count })
                        .collect();
                    write_csv(&rows, output.out.as_deref())?;
                }
            }
        }
        Command::Verify { check, seed, output } => {
            let checks = match check {
                Some(name) => vec![name.parse::<Check>()?],
                None => Check::ALL.to_vec(),
            };
            let reports = checks
                .into_iter()
                .map(|c| experiment::verify(c, seed))
                .collect::<Result<Vec<_>, _>>()?;
            let passed = reports.iter().all(|r| r.passed);
            match output.format.unwrap_or(Format::Json) {
                Format::Json => write_json(&reports, &output)?,
                Format::Csv => {
                    let rows: Vec<CheckRow> = reports
                        .iter()
                        .flat_map(|r| {
                            r.lines.iter().map(|l| CheckRow {
                                check: r.check,
                                name: &l.name,
                                passed: l.passed,
                                detail: &l.detail,
                            })
                        })
                        .collect();
                    write_csv(&rows, output.out.as_deref())?;
                }
            }
            if !passed {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Witness { name, n, out } => {
            let w = WitnessComplex::build(name.parse::<WitnessName>()?)?;
            match n {
                Some(target) => {
                    let out = out.ok_or_else(|| Error::Argument("--n requires --out for the .qcx file".into()))?;
                    let c = w.to_complex(&Embedding::identity(w.n, target)?)?;
                    let mut f = BufWriter::new(File::create(out)?);
                    c.write_qcx(&mut f)?;
                    f.flush()?;
                }
                None => write_json(&w.export(), &Output { out, format: None })?,
            }
        }
    }
    Ok(0)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Format { .. } => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("cubetop: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
