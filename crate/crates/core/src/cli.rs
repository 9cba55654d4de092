//! Command-line front end. `run` takes its streams as arguments so the whole
//! surface can be driven from tests.
//!
//! Exit codes: 0 = member (or check passed), 1 = non-member / check failed,
//! 2 = usage or input error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BenchConfig, BenchMetadata, BenchMode};
use crate::exec::Exec;
use crate::linalg::{complexity_of, Mat2};
use crate::membership::{
    decide_membership, monoid_decide, sanov_check, sanov_check_decimal, Status, Verdict,
};
use crate::oracle;
use crate::witness;
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "parabolic",
    version,
    about = "Membership in the subgroup and monoid of SL2(Z) generated by A(k) = [[1,k],[0,1]] and B(k) = [[1,0],[k,1]]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide subgroup membership; prints the verdict as JSON.
    Check(KMatrix),
    /// Decide monoid membership; prints the verdict as JSON.
    Monoid(KMatrix),
    /// Mod-4 membership test for k = 2.
    Sanov {
        #[command(flatten)]
        input: MatrixInput,
        /// Trust that det = 1 and read only the low-order digits.
        #[arg(long)]
        assume_det: bool,
    },
    /// Print only the generator word of a member.
    Word(KMatrix),
    /// Print every reduction step with the complexity after it.
    Trace(KMatrix),
    /// Enumerate freely reduced words and cross-check the reduction.
    Oracle {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        max_len: usize,
        /// Write the word table, one `word<TAB>m11 m12 m21 m22` line each.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, default_value_t = oracle::DEFAULT_MAX_LEN_CAP)]
        cap: usize,
    },
    /// Verify the non-member witness M(k, m).
    Witness {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
    },
    /// Stream `n,steps,elapsed_us,verdict` rows for seeded random instances.
    Bench(BenchArgs),
    /// Aggregate a bench CSV: per-size medians and log-log fit.
    Report {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        meta: PathBuf,
    },
}

#[derive(Debug, Args)]
struct KMatrix {
    #[arg(long)]
    k: u64,
    #[command(flatten)]
    input: MatrixInput,
}

#[derive(Debug, Args)]
struct MatrixInput {
    /// "m11 m12 m21 m22" (one quoted argument or four), or a JSON object
    /// {"m": [[..],[..]]}. Read from --file or stdin when absent.
    #[arg(allow_hyphen_values = true, num_args = 0..=4)]
    matrix: Vec<String>,
    #[arg(long, conflicts_with = "matrix")]
    file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// JSON file holding a full bench config.
    #[arg(long, conflicts_with_all = ["k", "mode", "sizes", "trials", "seed"])]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<u64>,
    /// positive-words or random-sl2
    #[arg(long)]
    mode: Option<BenchMode>,
    /// Comma-separated, strictly increasing word lengths or norm bounds.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<u64>>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Metadata sidecar path; defaults to `<out>.meta.json` when --out is set.
    #[arg(long)]
    meta: Option<PathBuf>,
    /// Run trials on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl clap::ValueEnum for BenchMode {
    fn value_variants<'a>() -> &'a [Self] {
        &[BenchMode::PositiveWords, BenchMode::RandomSl2]
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(match self {
            BenchMode::PositiveWords => clap::builder::PossibleValue::new("positive-words"),
            BenchMode::RandomSl2 => clap::builder::PossibleValue::new("random-sl2"),
        })
    }
}

/// Raw matrix text from the argument, the file, or stdin.
fn read_matrix_text(input: &MatrixInput, stdin: &mut dyn Read) -> anyhow::Result<String> {
    if !input.matrix.is_empty() {
        return Ok(input.matrix.join(" "));
    }
    let mut text = String::new();
    match &input.file {
        Some(path) => {
            File::open(path)
                .and_then(|mut f| f.read_to_string(&mut text))
                .with_context(|| format!("reading {}", path.display()))?;
        }
        None => {
            stdin.read_to_string(&mut text).context("reading stdin")?;
        }
    }
    Ok(text)
}

fn parse_matrix(text: &str) -> anyhow::Result<Mat2> {
    let text = text.trim();
    if text.starts_with('{') {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("bad matrix JSON: {e}")).into())
    } else {
        Ok(text.parse()?)
    }
}

fn exit_for(status: Status) -> anyhow::Result<i32> {
    match status {
        Status::Member => Ok(0),
        Status::NonMember | Status::BadForm => Ok(1),
        Status::NotSl2 => bail!("matrix is not in SL2(Z) (determinant != 1)"),
    }
}

fn verdict_line(v: &Verdict) -> anyhow::Result<String> {
    Ok(serde_json::to_string(v)?)
}

pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(cli.command, stdin, stdout) {
        Ok(code) => code,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}

fn dispatch(cmd: Command, stdin: &mut dyn Read, out: &mut dyn Write) -> anyhow::Result<i32> {
    match cmd {
        Command::Check(a) => {
            let m = parse_matrix(&read_matrix_text(&a.input, stdin)?)?;
            let v = decide_membership(&m, a.k)?;
            let code = exit_for(v.status)?;
            writeln!(out, "{}", verdict_line(&v)?)?;
            Ok(code)
        }
        Command::Monoid(a) => {
            let m = parse_matrix(&read_matrix_text(&a.input, stdin)?)?;
            let v = monoid_decide(&m, a.k)?;
            let code = exit_for(v.status)?;
            writeln!(out, "{}", verdict_line(&v)?)?;
            Ok(code)
        }
        Command::Sanov { input, assume_det } => {
            let text = read_matrix_text(&input, stdin)?;
            let member = if assume_det && !text.trim_start().starts_with('{') {
                sanov_check_decimal(&text)?
            } else {
                let m = parse_matrix(&text)?;
                if !assume_det {
                    m.require_sl2()?;
                }
                sanov_check(&m, !assume_det)
            };
            let report = serde_json::json!({
                "version": crate::membership::VERDICT_SCHEMA_VERSION,
                "k": 2,
                "status": if member { "Member" } else { "NonMember" },
                "det_checked": !assume_det,
            });
            writeln!(out, "{report}")?;
            Ok(if member { 0 } else { 1 })
        }
        Command::Word(a) => {
            let m = parse_matrix(&read_matrix_text(&a.input, stdin)?)?;
            let v = decide_membership(&m, a.k)?;
            let code = exit_for(v.status)?;
            if let Some(w) = &v.word {
                writeln!(out, "{w}")?;
            }
            Ok(code)
        }
        Command::Trace(a) => {
            let m = parse_matrix(&read_matrix_text(&a.input, stdin)?)?;
            let v = decide_membership(&m, a.k)?;
            let code = exit_for(v.status)?;
            writeln!(out, "start: complexity {}", complexity_of(&m))?;
            for (i, step) in v.trace.iter().enumerate() {
                writeln!(out, "step {}: {} -> complexity {}", i + 1, step.op, step.after)?;
            }
            writeln!(out, "status: {}", v.status)?;
            if let Some(w) = &v.word {
                writeln!(out, "word: {w}")?;
            }
            if let Some(s) = &v.stuck {
                writeln!(out, "stuck: {s}")?;
            }
            Ok(code)
        }
        Command::Oracle {
            k,
            max_len,
            dump,
            cap,
        } => {
            let table = oracle::enumerate_words_with(k, max_len, cap, Exec::default())?;
            if let Some(path) = dump {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(f);
                table.write_dump(&mut w)?;
                w.flush()?;
            }
            let report = oracle::check_table(&table, Exec::default());
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
            Ok(if report.is_consistent() { 0 } else { 1 })
        }
        Command::Witness { k, m } => {
            let report = witness::verify_witness(k, m)?;
            writeln!(out, "{}", serde_json::to_string(&report)?)?;
            Ok(if report.all_ok() { 0 } else { 1 })
        }
        Command::Bench(args) => run_bench_command(args, out),
        Command::Report { csv, meta } => {
            let meta: BenchMetadata = serde_json::from_reader(BufReader::new(
                File::open(&meta).with_context(|| format!("opening {}", meta.display()))?,
            ))?;
            let rows = bench::read_csv(
                BufReader::new(File::open(&csv).with_context(|| format!("opening {}", csv.display()))?),
                &meta.config,
            )?;
            let summary = bench::summarize(&rows);
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
            Ok(0)
        }
    }
}

fn bench_config(args: &BenchArgs) -> anyhow::Result<BenchConfig> {
    if let Some(path) = &args.config {
        let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
        return serde_json::from_reader(BufReader::new(f))
            .with_context(|| format!("parsing {}", path.display()));
    }
    let Some(sizes) = args.sizes.clone() else {
        bail!("bench needs --config or --sizes");
    };
    Ok(BenchConfig {
        k: args.k.unwrap_or(2),
        mode: args.mode.unwrap_or(BenchMode::PositiveWords),
        sizes,
        trials_per_size: args.trials.unwrap_or(1),
        seed: args.seed.unwrap_or(0),
    })
}

fn run_bench_command(args: BenchArgs, stdout: &mut dyn Write) -> anyhow::Result<i32> {
    let config = bench_config(&args)?;
    config.validate()?;
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };

    let meta_path = args
        .meta
        .clone()
        .or_else(|| args.out.as_ref().map(|p| PathBuf::from(format!("{}.meta.json", p.display()))));
    if let Some(path) = &meta_path {
        let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(f), &BenchMetadata::new(&config))?;
    }

    let mut file_sink;
    let sink: &mut dyn Write = match &args.out {
        Some(path) => {
            file_sink = BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            );
            &mut file_sink
        }
        None => stdout,
    };
    writeln!(sink, "{}", bench::CSV_HEADER)?;
    let mut io_err = None;
    bench::run_bench_with(&config, exec, |row| {
        if io_err.is_none() {
            if let Err(e) = writeln!(sink, "{}", row.csv_line()).and_then(|_| sink.flush()) {
                io_err = Some(e);
            }
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }
    sink.flush()?;
    Ok(0)
}
