//! Command-line front end. Exit codes: 0 when nothing failed, 1 when some
//! check failed or a table cell is underivable, 2 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::paperchecks::{self, CheckReport, RunConfig, Status};
use crate::projgeom::DEFAULT_POINT_BUDGET;
use crate::rdengine::{Engine, EngineError, TABLE_CHARS, TABLE_GROUPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Plain,
}

#[derive(Debug, Parser)]
#[command(name = "rdlab", version, about = "Finite-field checks and resolvent-degree bound derivations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub q: Option<u64>,
    #[arg(long, global = true)]
    pub p: Option<u64>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_POINT_BUDGET)]
    pub budget_points: u64,
    #[arg(long, global = true)]
    pub budget_secs: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true)]
    pub tower_depth: Option<u32>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write report records here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Report negative controls by their raw status, so they fail.
    #[arg(long, global = true)]
    pub inject_negative: bool,
    /// Include wall-clock times in reports (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every registered check, or those matching a glob.
    VerifyAll {
        #[arg(long, default_value = "*")]
        select: String,
    },
    /// Run one check by id.
    Check { id: String },
    /// List registered check ids.
    List,
    /// Print the derived bound table.
    Table,
    /// Print the derivation tree of rd_p(G).
    Explain {
        group: String,
        #[arg(value_name = "P")]
        characteristic: u32,
    },
}

impl Options {
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            n: self.n,
            q: self.q,
            p: self.p,
            m: self.m,
            trials: self.trials,
            tower_depth: self.tower_depth,
            budget_points: self.budget_points,
            budget_secs: self.budget_secs,
            inject_negative: self.inject_negative,
            timings: self.timings,
        }
    }
}

pub fn render_report(r: &CheckReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string(r).expect("reports serialize"),
        Format::Plain => {
            let status = serde_json::to_value(r.status).expect("status serializes");
            let mut line = format!("{:<13}{}", status.as_str().unwrap_or("?"), r.id);
            if let Some(ms) = r.elapsed_ms {
                line.push_str(&format!("  ({ms} ms)"));
            }
            if !r.witness.is_null() {
                line.push_str(&format!("\n    witness: {}", r.witness));
            }
            if let Some(e) = r.stats.get("error") {
                line.push_str(&format!("\n    error: {e}"));
            }
            line
        }
    }
}

fn emit(opts: &Options, stdout: &mut dyn Write, lines: &[String]) -> io::Result<()> {
    let mut text = String::new();
    for l in lines {
        text.push_str(l);
        text.push('\n');
    }
    if let Some(path) = &opts.out {
        File::create(path)?.write_all(text.as_bytes())
    } else {
        stdout.write_all(text.as_bytes())
    }
}

fn summary(reports: &[CheckReport]) -> String {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    format!(
        "{} checks: {} pass, {} evidence, {} inconclusive, {} fail, {} error",
        reports.len(),
        count(Status::Pass),
        count(Status::Evidence),
        count(Status::Inconclusive),
        count(Status::Fail),
        count(Status::Error)
    )
}

fn engine_exit(e: &EngineError) -> i32 {
    match e {
        EngineError::UnknownGroup(_) | EngineError::Parse { .. } | EngineError::Uncited { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

pub fn cmd_verify_all(opts: &Options, select: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<i32> {
    let specs = match paperchecks::select(select) {
        Ok(s) if !s.is_empty() => s,
        Ok(_) => {
            writeln!(stderr, "no check matches `{select}`")?;
            return Ok(EXIT_USAGE);
        }
        Err(e) => {
            writeln!(stderr, "{e}")?;
            return Ok(EXIT_USAGE);
        }
    };
    let reports = paperchecks::run_checks(&specs, &opts.run_config());
    let lines: Vec<String> = reports.iter().map(|r| render_report(r, opts.format)).collect();
    emit(opts, stdout, &lines)?;
    writeln!(stderr, "{}", summary(&reports))?;
    Ok(if reports.iter().any(|r| r.status == Status::Fail) { EXIT_FAIL } else { EXIT_OK })
}

pub fn cmd_check(opts: &Options, id: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<i32> {
    let Some(spec) = paperchecks::find(id) else {
        writeln!(stderr, "unknown check id `{id}`; try `rdlab list`")?;
        return Ok(EXIT_USAGE);
    };
    let report = paperchecks::run_check(spec, &opts.run_config());
    emit(opts, stdout, &[render_report(&report, opts.format)])?;
    let config_error = report.status == Status::Error && report.stats.get("kind").and_then(|k| k.as_str()) == Some("config");
    Ok(match report.status {
        Status::Fail => EXIT_FAIL,
        Status::Error if config_error => EXIT_USAGE,
        _ => EXIT_OK,
    })
}

pub fn cmd_table(opts: &Options, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<i32> {
    let mut engine = Engine::default_base();
    engine.derive();
    let table = match engine.table(&TABLE_GROUPS, &TABLE_CHARS) {
        Ok(t) => t,
        Err(e) => {
            writeln!(stderr, "{e}")?;
            return Ok(engine_exit(&e));
        }
    };
    if let Err(e) = engine.replay() {
        writeln!(stderr, "{e}")?;
        return Ok(EXIT_FAIL);
    }
    let text = match opts.format {
        Format::Json => serde_json::to_string(&table).expect("tables serialize"),
        Format::Plain => table.render().trim_end().to_string(),
    };
    emit(opts, stdout, &[text])?;
    Ok(EXIT_OK)
}

pub fn cmd_explain(opts: &Options, group: &str, p: u32, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<i32> {
    let mut engine = Engine::default_base();
    engine.derive();
    match engine.explain(group, p) {
        Ok(trace) => {
            let text = match opts.format {
                Format::Json => serde_json::to_string(&trace).expect("traces serialize"),
                Format::Plain => trace.render().trim_end().to_string(),
            };
            emit(opts, stdout, &[text])?;
            Ok(EXIT_OK)
        }
        Err(e) => {
            writeln!(stderr, "{e}")?;
            Ok(engine_exit(&e))
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> io::Result<i32> {
    let opts = &cli.opts;
    match &cli.command {
        Command::VerifyAll { select } => cmd_verify_all(opts, select, stdout, stderr),
        Command::Check { id } => cmd_check(opts, id, stdout, stderr),
        Command::List => {
            let lines: Vec<String> = paperchecks::registry()
                .iter()
                .map(|c| match opts.format {
                    Format::Json => serde_json::json!({ "id": c.id, "anchor": c.anchor, "control": c.control }).to_string(),
                    Format::Plain => format!("{:<38}{}", c.id, c.anchor),
                })
                .collect();
            emit(opts, stdout, &lines)?;
            Ok(EXIT_OK)
        }
        Command::Table => cmd_table(opts, stdout, stderr),
        Command::Explain { group, characteristic } => cmd_explain(opts, group, *characteristic, stdout, stderr),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return EXIT_OK;
        }
    };
    if let Some(j) = cli.opts.jobs {
        // the first configuration wins; later calls in the same process reuse it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
    }
    let result = dispatch(&cli, stdout, stderr);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "i/o error: {e}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("rdlab").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn unknown_id_is_usage_error() {
        let (code, _, err) = run_capture(&["check", "nosuch"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("nosuch"));
    }

    #[test]
    fn bad_flag_is_usage_error() {
        assert_eq!(run_capture(&["table", "--bogus"]).0, EXIT_USAGE);
    }

    #[test]
    fn plain_table() {
        let (code, out, _) = run_capture(&["table", "--format", "plain"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.lines().next().unwrap().contains("0   2   3   5   7"));
        assert_eq!(out.lines().count(), 5);
    }

    #[test]
    fn explain_unknown_group() {
        assert_eq!(run_capture(&["explain", "Q8x", "2"]).0, EXIT_USAGE);
    }
}
