//! `packbounds`: bound tables, crossover scans, LP certificates and the
//! hyperbolic computations from the command line.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use packing_bounds::euclid::{compute, crossover_scan, optimize_asymptotic_rate, transitions, Method};
use packing_bounds::hyperbolic::{hyp_bound_optimized, hyp_density_bound, overlap_report};
use packing_bounds::lp::{euclid_bound_from_certificate, lp_solve_spherical, LPProblem};
use packing_bounds::report::{self, render_round_up, Record};
use packing_bounds::specfun::Quadrature;
use packing_bounds::Error;

/// Dimensions of the standard comparison table.
pub const TABLE_DIMS: [usize; 14] = [12, 24, 36, 48, 60, 72, 84, 96, 108, 120, 240, 360, 480, 600];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Compute(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Compute(Error::Domain { .. }) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// One-line JSON for stderr.
    pub fn diagnostic(&self) -> String {
        let kind = match self {
            CliError::Config(_) => "invalid_config",
            CliError::Compute(Error::Domain { .. }) => "domain",
            CliError::Compute(Error::NonConvergence { .. }) => "non_convergence",
            CliError::Compute(_) => "numerical",
            CliError::Io(_) => "io",
        };
        json!({ "error": kind, "exit_code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Table,
    Bound,
    Crossover { lo: usize, hi: usize },
    Lp,
    Hyperbolic { refined: bool },
    Overlap { big_r: Vec<f64>, samples: u64 },
    Rate,
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub dims: Vec<usize>,
    pub methods: Vec<Method>,
    pub theta: Option<f64>,
    pub r: Option<f64>,
    pub degree: Option<usize>,
    pub format: Format,
    pub rel_tol: f64,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "packbounds", version, about = "Upper bounds on sphere-packing density")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format; each command has its own default.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    #[arg(long, global = true, default_value_t = 1e-11)]
    pub rel_tol: f64,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Write to a file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// `key=value` file overriding rel_tol, seed, samples or degree.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Euclidean density bounds for a list of dimensions.
    Table {
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Any bound, including lp_transfer and the hyperbolic ones.
    Bound {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<String>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Best of rogers, levenshtein and kl for each dimension in a range.
    Crossover {
        #[arg(long)]
        lo: usize,
        #[arg(long)]
        hi: usize,
    },
    /// Solve and certify the spherical-code linear program.
    Lp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 12)]
        degree: usize,
    },
    /// Hyperbolic density bound; optimized over the angle unless given.
    Hyperbolic {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        refined: bool,
    },
    /// Relative overlap of two radius-R balls at distance r.
    Overlap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        #[arg(long = "R", value_delimiter = ',', required = true)]
        big_r: Vec<f64>,
        /// Monte-Carlo samples at the last R (n <= 4); 0 disables.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
    /// Optimal angle and exponent of the asymptotic KL packing bound.
    Rate,
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>, CliError> {
    names
        .iter()
        .map(|s| s.trim().parse::<Method>().map_err(|e| CliError::Config(e.to_string())))
        .collect()
}

#[derive(Debug)]
struct Overrides {
    rel_tol: Option<f64>,
    seed: Option<u64>,
    samples: Option<u64>,
    degree: Option<usize>,
}

fn read_overrides(path: &std::path::Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_overrides(&text, &path.display().to_string())
}

fn parse_overrides(text: &str, origin: &str) -> Result<Overrides, CliError> {
    let mut o = Overrides {
        rel_tol: None,
        seed: None,
        samples: None,
        degree: None,
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| CliError::Config(format!("{origin}:{}: {what}", i + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let value = value.trim();
        match key.trim() {
            "rel_tol" => o.rel_tol = Some(value.parse().map_err(|_| bad("rel_tol must be a number"))?),
            "seed" => o.seed = Some(value.parse().map_err(|_| bad("seed must be an integer"))?),
            "samples" => o.samples = Some(value.parse().map_err(|_| bad("samples must be an integer"))?),
            "degree" => o.degree = Some(value.parse().map_err(|_| bad("degree must be an integer"))?),
            other => return Err(bad(&format!("unknown key `{other}`"))),
        }
    }
    Ok(o)
}

impl RunConfig {
    /// Resolves parsed arguments and the optional config file.
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let o = match &cli.common.config {
            Some(p) => Some(read_overrides(p)?),
            None => None,
        };
        let mut cfg = RunConfig {
            command: Command::Rate,
            dims: Vec::new(),
            methods: Vec::new(),
            theta: None,
            r: None,
            degree: None,
            format: Format::Json,
            rel_tol: o.as_ref().and_then(|o| o.rel_tol).unwrap_or(cli.common.rel_tol),
            seed: o.as_ref().and_then(|o| o.seed).unwrap_or(cli.common.seed),
            output_path: cli.common.output,
        };
        let degree_override = o.as_ref().and_then(|o| o.degree);
        let default_format = match cli.command {
            Sub::Table { dims, methods } => {
                cfg.command = Command::Table;
                cfg.dims = dims.unwrap_or_else(|| TABLE_DIMS.to_vec());
                cfg.methods = match methods {
                    Some(m) => parse_methods(&m)?,
                    None => vec![Method::Rogers, Method::Levenshtein, Method::Kl, Method::Cz],
                };
                Format::Csv
            }
            Sub::Bound { dims, methods, theta, r, degree } => {
                cfg.command = Command::Bound;
                cfg.dims = dims;
                cfg.methods = parse_methods(&methods)?;
                cfg.theta = theta;
                cfg.r = r;
                cfg.degree = degree_override.or(degree);
                Format::Csv
            }
            Sub::Crossover { lo, hi } => {
                cfg.command = Command::Crossover { lo, hi };
                cfg.dims = (lo..=hi).collect();
                Format::Csv
            }
            Sub::Lp { n, theta, degree } => {
                cfg.command = Command::Lp;
                cfg.dims = vec![n];
                cfg.theta = Some(theta);
                cfg.degree = Some(degree_override.unwrap_or(degree));
                Format::Json
            }
            Sub::Hyperbolic { dims, r, theta, refined } => {
                cfg.command = Command::Hyperbolic { refined };
                cfg.dims = dims;
                cfg.r = Some(r);
                cfg.theta = theta;
                Format::Csv
            }
            Sub::Overlap { n, r, big_r, samples } => {
                let samples = o.as_ref().and_then(|o| o.samples).unwrap_or(samples);
                cfg.command = Command::Overlap { big_r, samples };
                cfg.dims = vec![n];
                cfg.r = Some(r);
                Format::Json
            }
            Sub::Rate => Format::Json,
        };
        cfg.format = cli.common.format.unwrap_or(default_format);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(CliError::Config(format!("rel_tol = {} must lie in (0, 1)", self.rel_tol)));
        }
        let needs_dims = !matches!(self.command, Command::Rate);
        if needs_dims && self.dims.is_empty() {
            return Err(CliError::Config("dims must not be empty".into()));
        }
        if let Command::Crossover { lo, hi } = self.command {
            if !(4 <= lo && lo <= hi && hi <= 800) {
                return Err(CliError::Config(format!("crossover range {lo}..{hi} outside 4 <= lo <= hi <= 800")));
            }
        }
        if matches!(self.command, Command::Table | Command::Bound) && self.methods.is_empty() {
            return Err(CliError::Config("methods must not be empty".into()));
        }
        if self.command == Command::Table {
            if let Some(m) = self.methods.iter().find(|m| !Method::TABLE.contains(m)) {
                return Err(CliError::Config(format!("`{m}` is not a table method; use `bound`")));
            }
        }
        Ok(())
    }
}

fn records_output(records: &[Record], format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => report::to_csv(records)?,
        Format::Json => report::to_json(records)? + "\n",
        Format::Text => report::to_text(records),
    })
}

fn one_bound(cfg: &RunConfig, method: Method, n: usize, q: &Quadrature) -> Result<Record, CliError> {
    let missing = |what: &str| CliError::Config(format!("method `{method}` needs --{what}"));
    let rec = match method {
        Method::LpTransfer => {
            let theta = cfg.theta.ok_or_else(|| missing("theta"))?;
            let degree = cfg.degree.unwrap_or(12);
            let p = LPProblem::new(n, theta, degree)?;
            let cert = lp_solve_spherical(&p)?;
            let value = euclid_bound_from_certificate(&cert, &p)?;
            Record {
                n,
                method,
                value_log10: value.log10(),
                value_rounded: render_round_up(value, 4),
                k_star: None,
                theta_star: Some(theta),
            }
        }
        Method::HypCoarse | Method::HypRefined => {
            let r = cfg.r.ok_or_else(|| missing("r"))?;
            let refined = method == Method::HypRefined;
            let b = match cfg.theta {
                Some(theta) => hyp_density_bound(n, r, theta, refined)?,
                None => hyp_bound_optimized(n, r, refined)?,
            };
            Record::from(&b)
        }
        _ => Record::from(&compute(method, n, q)?),
    };
    Ok(rec)
}

/// Runs one command and returns the artifact it emits.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let q = Quadrature::with_rel_tol(cfg.rel_tol);
    match &cfg.command {
        Command::Table | Command::Bound => {
            let jobs: Vec<(usize, Method)> = cfg
                .dims
                .iter()
                .flat_map(|&n| cfg.methods.iter().map(move |&m| (n, m)))
                .collect();
            let records = jobs
                .par_iter()
                .map(|&(n, m)| one_bound(cfg, m, n, &q))
                .collect::<Result<Vec<_>, _>>()?;
            records_output(&records, cfg.format)
        }
        Command::Hyperbolic { refined } => {
            let method = if *refined { Method::HypRefined } else { Method::HypCoarse };
            let records = cfg
                .dims
                .par_iter()
                .map(|&n| one_bound(cfg, method, n, &q))
                .collect::<Result<Vec<_>, _>>()?;
            records_output(&records, cfg.format)
        }
        Command::Crossover { lo, hi } => {
            let scan = crossover_scan(*lo, *hi)?;
            let changes = transitions(&scan);
            Ok(match cfg.format {
                Format::Csv => {
                    let mut out = String::from("n,method\n");
                    for (n, m) in &scan {
                        out += &format!("{n},{m}\n");
                    }
                    out
                }
                Format::Json => {
                    let scan: Vec<_> = scan.iter().map(|(n, m)| json!({ "n": n, "method": m })).collect();
                    let changes: Vec<_> = changes
                        .iter()
                        .map(|(n, a, b)| json!({ "last": n, "from": a, "to": b }))
                        .collect();
                    serde_json::to_string_pretty(&json!({ "scan": scan, "transitions": changes })).unwrap() + "\n"
                }
                Format::Text => {
                    let mut out = format!("{lo}..{hi}: starts with {}\n", scan[0].1);
                    for (n, a, b) in changes {
                        out += &format!("{a} -> {b} between n = {n} and n = {}\n", n + 1);
                    }
                    out
                }
            })
        }
        Command::Lp => {
            let (n, theta, degree) = (cfg.dims[0], cfg.theta.unwrap_or(std::f64::consts::PI), cfg.degree.unwrap_or(12));
            let p = LPProblem::new(n, theta, degree)?;
            let cert = lp_solve_spherical(&p)?;
            Ok(match cfg.format {
                Format::Text => format!(
                    "n = {n}, theta = {theta}, degree = {degree}: objective {} (certified: {}, residual {:e})\n",
                    cert.objective, cert.certified, cert.residual
                ),
                _ => cert.to_json() + "\n",
            })
        }
        Command::Overlap { big_r, samples } => {
            let (n, r) = (cfg.dims[0], cfg.r.unwrap_or(0.0));
            let mc = (*samples > 0).then_some((*samples, cfg.seed));
            let res = overlap_report(n, r, big_r, mc)?;
            Ok(match cfg.format {
                Format::Json => serde_json::to_string_pretty(&res).unwrap() + "\n",
                Format::Csv => {
                    let mut out = String::from("n,r,R,finite,limit\n");
                    for (br, v) in &res.finite_r_values {
                        out += &format!("{n},{r},{br},{v},{}\n", res.limit_value);
                    }
                    out
                }
                Format::Text => {
                    let mut out = String::new();
                    for (_, v) in &res.finite_r_values {
                        out += &format!("{v:?}\n");
                    }
                    out
                }
            })
        }
        Command::Rate => {
            let rate = optimize_asymptotic_rate();
            Ok(match cfg.format {
                Format::Text => format!("theta_star = {}\nrate_log2 = {}\n", rate.theta_star, rate.rate_log2),
                _ => json!({ "theta_star": rate.theta_star, "rate_log2": rate.rate_log2 }).to_string() + "\n",
            })
        }
    }
}

/// Parses `args`, runs, writes the artifact and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let out = run(&cfg)?;
        match &cfg.output_path {
            Some(p) => std::fs::write(p, out)?,
            None => print!("{out}"),
        }
        Ok(())
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            e.exit_code()
        }
    }
}
