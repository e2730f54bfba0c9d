//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::experiments::{
    error_exit_code, exit_code, run_scenario, write_outputs, ConfigOverrides, ExperimentConfig, Scenario,
    EXIT_CHECK_FAILURE, EXIT_CONFIG_ERROR, EXIT_PASS,
};
use crate::models::io::save_json;
use crate::models::{gen_bipartite_regular, gen_spiked_wigner, sample_sbm, Graph};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "locstat",
    version,
    about = "Glauber dynamics experiments and exact small-instance oracles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hardcore Glauber dynamics on a triangle-free graph.
    Indepset(RunArgs),
    /// Ising Glauber dynamics on a spiked matrix.
    Spiked(RunArgs),
    /// Ising Glauber dynamics on a stochastic block model graph.
    Sbm(RunArgs),
    /// Exact identity suite on random small instances.
    Oracle(RunArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Check that an edge list parses and is triangle-free.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub flags: ConfigOverrides,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Random bipartite d-regular graph (edge list).
    Indepset,
    /// Spiked instance W + lambda v v^T (JSON).
    Spiked,
    /// Two-community block model sample (JSON).
    Sbm,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub kind: GenKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Edge-list file.
    #[arg(long)]
    pub graph: PathBuf,
    /// Vertex count (default: one past the largest index).
    #[arg(long)]
    pub n: Option<usize>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG_ERROR } else { EXIT_PASS };
        }
    };
    match cli.command {
        Command::Indepset(a) => run(Scenario::Indepset, a),
        Command::Spiked(a) => run(Scenario::Spiked, a),
        Command::Sbm(a) => run(Scenario::Sbm, a),
        Command::Oracle(a) => run(Scenario::Oracle, a),
        Command::Gen(a) => report_err(generate(&a)),
        Command::Validate(a) => validate(&a),
    }
}

fn report_err(result: Result<()>) -> i32 {
    match result {
        Ok(()) => EXIT_PASS,
        Err(e) => {
            eprintln!("error: {e}");
            error_exit_code(&e)
        }
    }
}

fn run(scenario: Scenario, args: RunArgs) -> i32 {
    let file = match args.config.as_deref().map(ConfigOverrides::from_json_file).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: reading config: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    let config = match ExperimentConfig::resolve(scenario, file, args.flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    let result = run_scenario(&config);
    let code = exit_code(&result);
    match result {
        Ok(output) => {
            let written = match &config.out {
                Some(dir) => write_outputs(&output, dir).map(Some),
                None => Ok(None),
            };
            match written {
                Ok(Some(paths)) => {
                    for p in paths {
                        eprintln!("wrote {}", p.display());
                    }
                }
                Ok(None) => match serde_json::to_string_pretty(&output.report) {
                    Ok(text) => println!("{text}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_CHECK_FAILURE;
                    }
                },
                Err(e) => {
                    eprintln!("error: writing outputs: {e}");
                    return error_exit_code(&e);
                }
            }
            for c in &output.report.checks {
                eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
            }
            for c in &output.report.oracle {
                eprintln!(
                    "{} {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.check,
                    c.worst_residual
                );
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    code
}

fn require(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required for this kind")))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn generate(a: &GenArgs) -> Result<()> {
    match a.kind {
        GenKind::Indepset => {
            let d = require(a.d, "d")?;
            if d < 0.0 || d.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "degree must be a nonnegative integer, got {d}"
                )));
            }
            let g = gen_bipartite_regular(a.n, d as usize, a.seed)?;
            emit(&g.to_edge_list(), a.out.as_deref())
        }
        GenKind::Spiked => {
            let inst = gen_spiked_wigner(a.n, require(a.lambda, "lambda")?, require(a.kappa, "kappa")?, a.seed)?;
            match &a.out {
                Some(p) => save_json(&inst, p),
                None => emit(&(serde_json::to_string_pretty(&inst)? + "\n"), None),
            }
        }
        GenKind::Sbm => {
            let inst = sample_sbm(a.n, require(a.d, "d")?, require(a.lambda, "lambda")?, a.seed)?;
            match &a.out {
                Some(p) => save_json(&inst, p),
                None => emit(&(serde_json::to_string_pretty(&inst)? + "\n"), None),
            }
        }
    }
}

fn validate(a: &ValidateArgs) -> i32 {
    let graph = match std::fs::read_to_string(&a.graph)
        .map_err(Error::from)
        .and_then(|text| Graph::from_edge_list(&text, a.n))
    {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    match graph.find_triangle() {
        Some((x, y, z)) => {
            eprintln!("{}", Error::TriangleFound(x, y, z));
            EXIT_CHECK_FAILURE
        }
        None => {
            println!(
                "ok: n = {}, edges = {}, max degree = {}, triangle-free",
                graph.n(),
                graph.edge_count(),
                graph.max_degree()
            );
            EXIT_PASS
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_flag_is_usage_error() {
        assert_eq!(dispatch(["locstat", "oracle", "--temperature", "3"]), EXIT_CONFIG_ERROR);
        assert_eq!(dispatch(["locstat"]), EXIT_CONFIG_ERROR);
    }

    #[test]
    fn beta_list_parses() {
        let cli = Cli::try_parse_from(["locstat", "sbm", "--beta", "0.2,0.4", "--mode", "end-state"]).unwrap();
        match cli.command {
            Command::Sbm(a) => assert_eq!(a.flags.beta, Some(vec![0.2, 0.4])),
            _ => panic!(),
        }
    }
}
