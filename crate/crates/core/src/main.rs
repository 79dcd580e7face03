use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cvweno::element::SpaceKind;
use cvweno::harness::{convergence, output, run, selftest, BenchmarkConfig, BenchmarkId, Scheme};
use cvweno::{Error, Result};

#[derive(Parser)]
#[command(name = "cvweno", version, about = "CG/DG solver with HWENO-based stabilization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one benchmark to its final time.
    Run(RunArgs),
    /// Run a benchmark on several meshes and print the EOC table.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated cell counts per axis, coarse to fine.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<usize>,
    },
    /// Run the randomized property checks.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; command-line flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    benchmark: Option<String>,
    /// cg or dg.
    #[arg(long)]
    space: Option<String>,
    /// cc-weno, cv-weno, cv-weno-sc, low-order, none or galerkin.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    /// Cells per axis, e.g. `64` or `192,48`.
    #[arg(long, value_delimiter = ',')]
    cells: Option<Vec<usize>>,
    /// Per-axis DOF target.
    #[arg(long)]
    dofs: Option<usize>,
    #[arg(long)]
    tend: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Snapshot cadence in steps.
    #[arg(long)]
    every: Option<usize>,
    #[arg(long)]
    limiter: bool,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn config(&self) -> Result<BenchmarkConfig> {
        let mut c = match (&self.config, &self.benchmark) {
            (Some(path), _) => BenchmarkConfig::load(path)?,
            (None, Some(b)) => BenchmarkConfig::new(b.parse::<BenchmarkId>()?),
            (None, None) => return Err(Error::Config("either --config or --benchmark is required".into())),
        };
        if let Some(b) = &self.benchmark {
            c.benchmark = b.parse()?;
        }
        if let Some(s) = &self.space {
            c.space = Some(match s.as_str() {
                "cg" => SpaceKind::Continuous,
                "dg" => SpaceKind::Discontinuous,
                other => return Err(Error::Config(format!("unknown space '{other}'"))),
            });
        }
        if let Some(s) = &self.scheme {
            c.scheme = s.parse::<Scheme>()?;
        }
        if let Some(p) = self.p {
            c.p = p;
        }
        if let Some(cells) = &self.cells {
            c.cells = Some(cells.clone());
            c.dofs = None;
        }
        if let Some(n) = self.dofs {
            c.dofs = Some(n);
            if self.cells.is_none() {
                c.cells = None;
            }
        }
        if let Some(t) = self.tend {
            c.t_end = Some(t);
        }
        if let Some(cfl) = self.cfl {
            c.cfl = cfl;
        }
        if let Some(out) = &self.out {
            c.output.dir = Some(out.clone());
        }
        if let Some(every) = self.every {
            c.output.every = every;
        }
        if self.limiter {
            c.limiter = Some(true);
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        Ok(c)
    }
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let config = args.config()?;
            let outcome = run(&config)?;
            println!("{}", outcome.report.summary());
            Ok(true)
        }
        Command::Convergence { run: args, levels } => {
            let config = args.config()?;
            let rows = convergence(&config, &levels)?;
            print!("{}", output::csv_table(&rows));
            if let Some(dir) = &config.output.dir {
                output::write_csv_table(&dir.join("convergence.csv"), &rows)?;
            }
            Ok(true)
        }
        Command::Selftest { seed } => {
            let checks = selftest::run_selftest(seed)?;
            for c in &checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            Ok(checks.iter().all(|c| c.passed))
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
