mod config;
mod verify;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use twosat::analytics::{m_at_lambda, p_at_lambda, p_nk, q_nk, r_nk, s_pk, coupled_edge_probability, theta};
use twosat::experiments::{
    estimate_exponents, estimate_window, run_sweep, sweep_csv, sweep_json, with_workers, Axis, ExponentsConfig,
    Model, Point, SweepConfig,
};
use twosat::formula::{read_dimacs, write_dimacs};
use twosat::hourglass::{find_disjoint_hourglasses, find_giant_hourglass, verify_hourglass, DisjointConfig, Hourglass};
use twosat::spine::GenerativeSource;
use twosat::{satisfying_assignment, spine, Error, Formula};

#[derive(Debug, Parser)]
#[command(name = "twosat", version, about = "Random 2-SAT toolkit", args_override_self = true)]
struct Cli {
    /// Master seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Write machine-readable output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// JSON file of flag values; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a random formula as DIMACS.
    Gen(GenArgs),
    /// Decide satisfiability of a DIMACS formula.
    Solve(InputArgs),
    /// List the spine of a DIMACS formula.
    Spine(InputArgs),
    /// Search for hourglasses.
    Hourglass(HourglassArgs),
    /// Tabulate exact component laws, or theta.
    Exact(ExactArgs),
    /// Monte Carlo sweep over a grid.
    Sweep(SweepArgs),
    /// Estimate the scaling window.
    Window(WindowArgs),
    /// Fit the three critical exponents.
    Exponents(ExponentsArgs),
    /// Run the oracle agreement suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct GenArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, group = "point")]
    m: Option<u64>,
    #[arg(long, group = "point")]
    p: Option<f64>,
    #[arg(long, group = "point", allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, value_enum, default_value_t = Ensemble::Fnm)]
    ensemble: Ensemble,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Ensemble {
    Fnm,
    Fnp,
}

impl From<Ensemble> for Model {
    fn from(e: Ensemble) -> Model {
        match e {
            Ensemble::Fnm => Model::Fnm,
            Ensemble::Fnp => Model::Fnp,
        }
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct InputArgs {
    /// DIMACS file; standard input when absent or `-`.
    input: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct HourglassArgs {
    /// DIMACS file for the giant search.
    input: Option<PathBuf>,
    /// Candidate centers for the giant search.
    #[arg(long, default_value_t = 200)]
    centers: usize,
    /// Run the disjoint search on a revealed formula with this many variables.
    #[arg(long, requires = "t", conflicts_with = "input")]
    n: Option<u32>,
    /// Distance below the window, `p = (1 - t n^(-1/3)) / 2n`.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct ExactArgs {
    #[arg(long, requires = "kmax")]
    n: Option<u64>,
    #[arg(long, group = "prob")]
    p: Option<f64>,
    #[arg(long, group = "prob", allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long)]
    kmax: Option<usize>,
    /// Tabulate theta at these offsets instead.
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, conflicts_with = "n")]
    eps: Vec<f64>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',', action = ArgAction::Set)]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, allow_hyphen_values = true, group = "axis")]
    lambda: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, allow_hyphen_values = true, group = "axis")]
    eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, group = "axis")]
    m: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, group = "axis")]
    p: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Ensemble::Fnm)]
    ensemble: Ensemble,
    #[arg(long)]
    trials: u64,
    /// Literals tested per trial; the exact spine when absent.
    #[arg(long)]
    literal_samples: Option<usize>,
    #[arg(long)]
    cap: Option<usize>,
    /// Nest the formulas of each trial along the axis.
    #[arg(long)]
    coupled: bool,
    /// Fill the seconds column (output is then not reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct WindowArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
    #[arg(long, default_value_t = 2000)]
    trials: u64,
    /// Relative resolution in `α`.
    #[arg(long, default_value_t = 1e-6)]
    resolution: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct ExponentsArgs {
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "1024,2048,4096,8192")]
    n: Vec<u32>,
    #[arg(long, default_value_t = 16384)]
    beta_n: u32,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_value = "0.1,0.15,0.2,0.3,0.4")]
    beta_eps: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    trials: u64,
    #[arg(long, default_value_t = 0.4)]
    delta: f64,
}

#[derive(Debug, Args)]
#[command(args_override_self = true)]
struct VerifyArgs {
    /// Random formulas for the SAT check; the spine checks use a tenth.
    #[arg(long, default_value_t = 10_000)]
    cases: u64,
}

enum Failure {
    Usage(String),
    Verify,
    Io(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Io(e),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Failure {
    Failure::Io(Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_formula(input: &Option<PathBuf>) -> Result<Formula, Failure> {
    let text = match input.as_deref() {
        None => read_stdin()?,
        Some(p) if p == Path::new("-") => read_stdin()?,
        Some(p) => std::fs::read_to_string(p).map_err(|e| io_error(p, e))?,
    };
    let read = read_dimacs(&text)?;
    if read.duplicates > 0 {
        eprintln!("note: {} duplicate clauses ignored", read.duplicates);
    }
    Ok(read.formula)
}

fn read_stdin() -> Result<String, Failure> {
    let mut s = String::new();
    std::io::stdin()
        .read_to_string(&mut s)
        .map_err(|e| io_error(Path::new("<stdin>"), e))?;
    Ok(s)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| io_error(Path::new("<stdout>"), e)),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

fn csv_only_json(format: Option<Format>, what: &str) -> Result<(), Failure> {
    match format {
        Some(Format::Csv) => Err(Failure::Usage(format!("{what} output is JSON only"))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct HourglassOut {
    center: i64,
    in_size: usize,
    out_size: usize,
    verified: bool,
}

fn hourglass_out(f: Option<&Formula>, h: &Hourglass, verified: Option<bool>) -> HourglassOut {
    HourglassOut {
        center: h.center.to_dimacs(),
        in_size: h.in_portion.len(),
        out_size: h.out_portion.len(),
        verified: verified.unwrap_or_else(|| f.is_some_and(|f| verify_hourglass(f, h))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let fmt = cli.format;
    let seed = cli.seed;
    match cli.command {
        Command::Gen(a) => {
            let point = match (a.m, a.p, a.lambda) {
                (Some(m), None, None) => match a.ensemble {
                    Ensemble::Fnm => Point::Fnm { n: a.n, m },
                    Ensemble::Fnp => Point::Fnp { n: a.n, p: twosat::analytics::p_for_m(a.n, m) },
                },
                (None, Some(p), None) => match a.ensemble {
                    Ensemble::Fnm => Point::Fnm { n: a.n, m: twosat::analytics::m_for_p(a.n, p) },
                    Ensemble::Fnp => Point::Fnp { n: a.n, p },
                },
                (None, None, Some(l)) => match a.ensemble {
                    Ensemble::Fnm => Point::Fnm { n: a.n, m: m_at_lambda(a.n, l) },
                    Ensemble::Fnp => Point::Fnp { n: a.n, p: p_at_lambda(a.n, l) },
                },
                _ => return Err(Failure::Usage("gen needs one of --m, --p, --lambda".into())),
            };
            let f = point.sample(&mut ChaCha8Rng::seed_from_u64(seed))?;
            eprintln!("{} variables, {} clauses", f.n(), f.len());
            emit(&cli.out, &write_dimacs(&f))
        }
        Command::Solve(a) => {
            let f = read_formula(&a.input)?;
            let assignment = satisfying_assignment(&f);
            eprintln!("{}", if assignment.is_some() { "SAT" } else { "UNSAT" });
            let text = match fmt {
                Some(Format::Json) => {
                    #[derive(Serialize)]
                    struct Out {
                        satisfiable: bool,
                        assignment: Option<Vec<i64>>,
                    }
                    to_json(&Out {
                        satisfiable: assignment.is_some(),
                        assignment: assignment.as_ref().map(|a| signed(a)),
                    })
                }
                Some(Format::Csv) => {
                    let mut s = String::from("variable,value\n");
                    for (i, v) in assignment.iter().flatten().enumerate() {
                        s.push_str(&format!("{},{}\n", i + 1, *v as u8));
                    }
                    s
                }
                None => match &assignment {
                    None => "s UNSATISFIABLE\n".to_string(),
                    Some(a) => {
                        let lits: Vec<String> = signed(a).iter().map(|x| x.to_string()).collect();
                        format!("s SATISFIABLE\nv {} 0\n", lits.join(" "))
                    }
                },
            };
            emit(&cli.out, &text)
        }
        Command::Spine(a) => {
            let f = read_formula(&a.input)?;
            let s = spine(&f);
            eprintln!("spine size {}", s.size());
            let members: Vec<i64> = s.members.iter().map(|x| x.to_dimacs()).collect();
            let text = match fmt {
                Some(Format::Csv) => {
                    let mut t = String::from("literal\n");
                    for x in &members {
                        t.push_str(&format!("{x}\n"));
                    }
                    t
                }
                _ => {
                    #[derive(Serialize)]
                    struct Out {
                        size: usize,
                        members: Vec<i64>,
                    }
                    to_json(&Out { size: s.size(), members })
                }
            };
            emit(&cli.out, &text)
        }
        Command::Hourglass(a) => {
            csv_only_json(fmt, "hourglass")?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let text = if let (Some(n), Some(t)) = (a.n, a.t) {
                let p = p_at_lambda(n, -t);
                let mut src = GenerativeSource::new(n, p, ChaCha8Rng::seed_from_u64(seed));
                let report = find_disjoint_hourglasses(&mut src, &DisjointConfig::new(t), &mut rng);
                let revealed = src.revealed_formula();
                let found: Vec<HourglassOut> =
                    report.hourglasses.iter().map(|h| hourglass_out(Some(&revealed), h, None)).collect();
                eprintln!(
                    "{} hourglasses after {} looks ({} trees in range, {} promising)",
                    found.len(),
                    report.looks,
                    report.trees_in_range,
                    report.promising
                );
                to_json(&found)
            } else {
                let f = read_formula(&a.input)?;
                let h = find_giant_hourglass(&f, a.centers, &mut rng);
                let out = hourglass_out(Some(&f), &h, None);
                eprintln!("girth {}", h.girth());
                to_json(&out)
            };
            emit(&cli.out, &text)
        }
        Command::Exact(a) => {
            let rows: Vec<Vec<String>>;
            let header: Vec<&str>;
            if !a.eps.is_empty() {
                header = vec!["eps", "theta"];
                rows = a.eps.iter().map(|&e| vec![fmt9(e), fmt9(theta(e))]).collect();
            } else {
                let (Some(n), Some(kmax)) = (a.n, a.kmax) else {
                    return Err(Failure::Usage("exact needs --n and --kmax, or --eps".into()));
                };
                let p = match (a.p, a.lambda) {
                    (Some(p), None) => p,
                    (None, Some(l)) => p_at_lambda(n as u32, l),
                    _ => return Err(Failure::Usage("exact needs --p or --lambda".into())),
                };
                let q = coupled_edge_probability(p);
                header = vec!["k", "p_nk", "q_nk", "r_nk", "s_pk"];
                let mut r = Vec::new();
                for k in 1..=kmax.min(n as usize) {
                    r.push(vec![
                        k.to_string(),
                        fmt9(p_nk(n, p, k)?),
                        fmt9(q_nk(n, p, k)?),
                        fmt9(r_nk(n, p, k)?),
                        fmt9(s_pk(k, q)?),
                    ]);
                }
                rows = r;
            }
            let text = match fmt {
                Some(Format::Json) => {
                    let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                        .iter()
                        .map(|r| {
                            header
                                .iter()
                                .zip(r)
                                .map(|(h, v)| {
                                    let num: serde_json::Value =
                                        serde_json::from_str(v).expect("formatted numbers parse");
                                    (h.to_string(), num)
                                })
                                .collect()
                        })
                        .collect();
                    to_json(&objs)
                }
                _ => {
                    let mut t = header.join(",") + "\n";
                    for r in rows {
                        t.push_str(&(r.join(",") + "\n"));
                    }
                    t
                }
            };
            emit(&cli.out, &text)
        }
        Command::Sweep(a) => {
            let axis = match (a.lambda, a.eps, a.m, a.p) {
                (Some(v), None, None, None) => Axis::Lambda(v),
                (None, Some(v), None, None) => Axis::Eps(v),
                (None, None, Some(v), None) => Axis::M(v),
                (None, None, None, Some(v)) => Axis::P(v),
                (None, None, None, None) => Axis::Lambda(Vec::new()),
                _ => return Err(Failure::Usage("give exactly one of --lambda, --eps, --m, --p".into())),
            };
            let config = SweepConfig {
                n: a.n,
                axis,
                ensemble: a.ensemble.into(),
                trials: a.trials,
                literal_samples: a.literal_samples,
                cap: a.cap,
                seed,
                workers: cli.workers,
                out: cli.out.clone(),
                coupled: a.coupled,
                timing: a.timing,
            };
            let rows = run_sweep(&config)?;
            eprintln!("{} rows", rows.len());
            let text = match fmt {
                Some(Format::Json) => sweep_json(&rows)? + "\n",
                _ => sweep_csv(&rows)?,
            };
            emit(&cli.out, &text)
        }
        Command::Window(a) => {
            csv_only_json(fmt, "window")?;
            let w = with_workers(cli.workers, || estimate_window(a.n, a.delta, a.trials, seed, a.resolution))??;
            eprintln!("window [{:.6}, {:.6}]", w.alpha_minus, w.alpha_plus);
            emit(&cli.out, &to_json(&w))
        }
        Command::Exponents(a) => {
            csv_only_json(fmt, "exponents")?;
            let config = ExponentsConfig {
                n: a.n,
                beta_n: a.beta_n,
                beta_eps: a.beta_eps,
                trials: a.trials,
                delta: a.delta,
                seed,
            };
            let e = with_workers(cli.workers, || estimate_exponents(&config))??;
            eprintln!(
                "beta {:.3}, window slope {:.3}, delta {:.3}",
                e.beta.slope, e.gamma_proxy.slope, e.delta
            );
            emit(&cli.out, &to_json(&e))
        }
        Command::Verify(a) => {
            let checks = with_workers(cli.workers, || verify::run(a.cases, seed))?;
            let text = verify::report(&checks);
            emit(&cli.out, &text)?;
            if checks.iter().all(|c| c.passed) {
                eprintln!("all {} checks passed", checks.len());
                Ok(())
            } else {
                Err(Failure::Verify)
            }
        }
    }
}

fn signed(assignment: &[bool]) -> Vec<i64> {
    assignment
        .iter()
        .enumerate()
        .map(|(i, &v)| if v { i as i64 + 1 } else { -(i as i64 + 1) })
        .collect()
}

fn parse(argv: &[String]) -> Result<Cli, clap::Error> {
    let Some(path) = config::config_path(argv) else {
        return Cli::try_parse_from(argv);
    };
    let text = std::fs::read_to_string(&path).map_err(|e| {
        clap::Error::raw(clap::error::ErrorKind::Io, format!("{}: {e}\n", path.display()))
    })?;
    let tokens = config::config_tokens(&text)
        .map_err(|e| clap::Error::raw(clap::error::ErrorKind::InvalidValue, e + "\n"))?;
    let name = argv
        .iter()
        .skip(1)
        .find(|a| SUBCOMMANDS.contains(&a.as_str()))
        .map_or("", String::as_str);
    Cli::try_parse_from(config::splice(argv, name, tokens))
}

const SUBCOMMANDS: [&str; 9] = ["gen", "solve", "spine", "hourglass", "exact", "sweep", "window", "exponents", "verify"];

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match parse(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                clap::error::ErrorKind::Io => 3,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify) => ExitCode::from(2),
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
