//! The `copent` command line.
//!
//! Exit status: 0 on success, 1 for usage errors (bad flags, bad column
//! selections, `k` not below the row count), 2 for data errors. Warnings go
//! to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use copent_core::assoc::extract_groups;
use copent_core::dataset::{impute, select_columns};
use copent_core::synth::{generate, SynthSpec};
use copent_core::{Dataset, EstimatorConfig, ImputePolicy, Measure, Metric, RankMode, Selector};

use crate::csv_io::{load_csv, save_csv, write_csv, CsvOptions};
use crate::error::Error;
use crate::fetch::{fetch_all, parse_manifest, FetchStatus, DEFAULT_PARALLELISM};
use crate::heatmap::{render_svg, HeatmapOptions};
use crate::matrix_io::{groups_to_json, load_matrix, matrix_to_json, write_matrix_csv};
use crate::parallel::{association_matrix_parallel, default_jobs};
use crate::xpt::read_xpt;

#[derive(Parser, Debug)]
#[command(name = "copent", version, about = "Association discovery with copula entropy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert a SAS transport (.xpt) file to CSV.
    Convert {
        #[arg(long)]
        xpt: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the pairwise association matrix of a dataset.
    Assoc {
        /// CSV file, or .xpt transport file.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "ce")]
        measure: Measure,
        /// Neighbour count (ce only; default 3).
        #[arg(long)]
        k: Option<usize>,
        /// Neighbour distance (ce only).
        #[arg(long)]
        metric: Option<Metric>,
        #[arg(long, default_value = "mean")]
        impute: ImputePolicy,
        /// Column selection, e.g. `1-10,AGE,15` (1-based, ranges inclusive).
        #[arg(long)]
        columns: Option<String>,
        /// Seed for tie-breaking jitter (ce only).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Jitter magnitude (ce only; 0 disables).
        #[arg(long)]
        jitter: Option<f64>,
        /// Tie rule for ranks: maximal or average (ce only).
        #[arg(long)]
        rank_mode: Option<RankModeArg>,
        /// Output path; standard output if omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write JSON (with config and warnings) instead of matrix CSV.
        #[arg(long)]
        json: bool,
        /// Raise negative ce entries to zero.
        #[arg(long)]
        clamp_nonneg: bool,
        #[arg(long, env = "COPENT_JOBS")]
        jobs: Option<usize>,
        #[arg(long, default_value = ",")]
        delimiter: char,
        /// Extra tokens read as missing, comma-separated.
        #[arg(long)]
        na: Option<String>,
    },
    /// Extract groups of associated variables from a matrix.
    Groups {
        /// Matrix CSV, or matrix JSON.
        #[arg(long)]
        matrix: PathBuf,
        /// Edge threshold; default 0.1 for ce, 0.5 otherwise.
        #[arg(long)]
        threshold: Option<f64>,
        /// Measure held by a matrix CSV (JSON records its own).
        #[arg(long, default_value = "ce")]
        measure: Measure,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Render a matrix as an SVG heatmap.
    Heatmap {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "ce")]
        measure: Measure,
        #[arg(long, default_value_t = true, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
        mask_diagonal: bool,
        #[arg(long)]
        clamp_nonneg: bool,
    },
    /// Download the files listed in a manifest.
    Fetch {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        dest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PARALLELISM)]
        parallel: usize,
    },
    /// Generate a synthetic dataset from a JSON spec.
    Synth {
        /// JSON spec inline, or `@file` to read it from a file.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum RankModeArg {
    Maximal,
    Average,
}

/// A failure with its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn data(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: 2,
        message: e.to_string(),
    }
}

fn classify(e: Error) -> Failure {
    use copent_core::Error as C;
    match &e {
        Error::Core(
            C::UnknownColumn(_)
            | C::IndexOutOfBounds { .. }
            | C::InvalidSelector(_)
            | C::EmptySelection
            | C::KTooLarge { .. }
            | C::ZeroK
            | C::InvalidJitter(_)
            | C::InvalidThreshold(_)
            | C::InvalidSpec(_),
        ) => usage(e.to_string()),
        _ => data(e),
    }
}

fn core(e: copent_core::Error) -> Failure {
    classify(Error::Core(e))
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

fn write_output(path: Option<&Path>, content: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| data(Error::io(p, e))),
        None => std::io::stdout().write_all(content).map_err(data),
    }
}

fn load_input(path: &Path, csv: &CsvOptions) -> Result<Dataset, Failure> {
    let is_xpt = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xpt"));
    if is_xpt {
        let x = read_xpt(path).map_err(classify)?;
        x.warnings.iter().for_each(|w| warn(w));
        Ok(x.dataset)
    } else {
        load_csv(path, csv).map_err(classify)
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Convert { xpt, out } => {
            let x = read_xpt(&xpt).map_err(classify)?;
            x.warnings.iter().for_each(|w| warn(w));
            save_csv(&x.dataset, &out).map_err(classify)
        }
        Command::Assoc {
            input,
            measure,
            k,
            metric,
            impute: policy,
            columns,
            seed,
            jitter,
            rank_mode,
            output,
            json,
            clamp_nonneg,
            jobs,
            delimiter,
            na,
        } => {
            if measure != Measure::Ce {
                for (given, flag) in [
                    (k.is_some(), "--k"),
                    (metric.is_some(), "--metric"),
                    (jitter.is_some(), "--jitter"),
                    (rank_mode.is_some(), "--rank-mode"),
                ] {
                    if given {
                        return Err(usage(format!("{flag} only applies to --measure ce")));
                    }
                }
            }
            if !delimiter.is_ascii() {
                return Err(usage("--delimiter must be a single ASCII character"));
            }
            let mut csv = CsvOptions {
                delimiter: delimiter as u8,
                ..CsvOptions::default()
            };
            if let Some(na) = na {
                csv.na_tokens.extend(na.split(',').map(|t| t.trim().to_string()));
            }
            let defaults = EstimatorConfig::default();
            let cfg = EstimatorConfig {
                k: k.unwrap_or(defaults.k),
                metric: metric.unwrap_or(defaults.metric),
                jitter_magnitude: jitter.unwrap_or(defaults.jitter_magnitude),
                jitter_seed: seed,
                rank_mode: match rank_mode {
                    Some(RankModeArg::Average) => RankMode::Averaged,
                    _ => RankMode::Maximal,
                },
            };
            let mut ds = load_input(&input, &csv)?;
            if let Some(spec) = columns {
                let selectors = Selector::parse_list(&spec).map_err(core)?;
                ds = select_columns(&ds, &selectors).map_err(core)?;
            }
            ds = impute(&ds, policy).map_err(core)?;
            if measure == Measure::Ce {
                cfg.validate(ds.n_rows()).map_err(core)?;
            }
            let jobs = jobs.unwrap_or_else(default_jobs);
            let mut m = association_matrix_parallel(&ds, measure, &cfg, jobs).map_err(core)?;
            for w in m.warnings() {
                warn(&w.message);
            }
            if clamp_nonneg {
                m = m.clamp_nonneg();
            }
            let bytes = if json {
                matrix_to_json(&m).map_err(classify)?.into_bytes()
            } else {
                let mut buf = Vec::new();
                write_matrix_csv(&m, &mut buf).map_err(classify)?;
                buf
            };
            write_output(output.as_deref(), &bytes)
        }
        Command::Groups {
            matrix,
            threshold,
            measure,
            output,
        } => {
            let m = load_matrix(&matrix, measure).map_err(classify)?;
            let threshold = threshold.unwrap_or(m.measure().default_threshold());
            let report = extract_groups(&m, threshold).map_err(core)?;
            let json = groups_to_json(&report).map_err(classify)?;
            match output {
                Some(path) => {
                    write_output(Some(&path), json.as_bytes())?;
                    print!("{report}");
                    Ok(())
                }
                None => write_output(None, json.as_bytes()),
            }
        }
        Command::Heatmap {
            matrix,
            out,
            measure,
            mask_diagonal,
            clamp_nonneg,
        } => {
            let m = load_matrix(&matrix, measure).map_err(classify)?;
            let svg = render_svg(
                &m,
                &HeatmapOptions {
                    mask_diagonal,
                    clamp_nonneg,
                },
            );
            write_output(Some(&out), svg.as_bytes())
        }
        Command::Fetch {
            manifest,
            dest,
            parallel,
        } => {
            let text = fs::read_to_string(&manifest).map_err(|e| usage(Error::io(&manifest, e).to_string()))?;
            let report = fetch_all(&parse_manifest(&text), &dest, parallel).map_err(classify)?;
            for o in &report.outcomes {
                let tag = match &o.status {
                    FetchStatus::Downloaded => "downloaded",
                    FetchStatus::Skipped => "skipped",
                    FetchStatus::Failed(_) => continue,
                };
                println!("{tag}\t{}", o.path.display());
            }
            let failures: Vec<_> = report.failures().collect();
            for (url, msg) in &failures {
                warn(&format!("{url}: {msg}"));
            }
            if failures.is_empty() {
                Ok(())
            } else {
                Err(data(format!(
                    "{} of {} downloads failed",
                    failures.len(),
                    report.outcomes.len()
                )))
            }
        }
        Command::Synth { spec, out } => {
            let text = match spec.strip_prefix('@') {
                Some(path) => fs::read_to_string(path).map_err(|e| usage(Error::io(path, e).to_string()))?,
                None => spec,
            };
            let spec: SynthSpec = serde_json::from_str(&text).map_err(|e| usage(format!("invalid spec: {e}")))?;
            let ds = generate(&spec).map_err(core)?;
            let mut buf = Vec::new();
            write_csv(&ds, &mut buf).map_err(classify)?;
            write_output(out.as_deref(), &buf)
        }
    }
}
