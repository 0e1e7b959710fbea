use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use heisdistort::config::Config;
use heisdistort::experiments::axioms::{self, AxiomsArgs};
use heisdistort::experiments::beta::{self, Figure, Plot};
use heisdistort::experiments::distort::{self, DistortArgs};
use heisdistort::experiments::projection::{self, ProjectionArgs};
use heisdistort::experiments::sobolev::{self, SobolevArgs};
use heisdistort::experiments::tubes::{self, TubesArgs};
use heisdistort::{ExperimentReport, Thresholds};
use heisdistort_core::bounds::Formula;

#[derive(Parser, Debug)]
#[command(name = "heisdistort", version, about = "Heisenberg-group dimension distortion experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Plain `key = value` file presetting any flag; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Leave the wall time out so equal seeds give byte-identical reports.
    #[arg(long, global = true)]
    reproducible: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Group law and gauge invariants on random tuples.
    Axioms(AxiomsOpts),
    /// Disjoint-tubes estimate on random near-vertical directions.
    Tubes(TubesOpts),
    /// Split round trips and the Lipschitz behaviour of the vertical projection.
    Projection(ProjectionOpts),
    /// Bound curves for plotting.
    Beta(BetaOpts),
    /// Image dimension of lines through the four-corner set.
    Distort(DistortOpts),
    /// Level Sobolev norms of the random map.
    Sobolev(SobolevOpts),
}

#[derive(Args, Debug)]
struct AxiomsOpts {
    /// Group parameter; cycles through 1, 2, 3 when absent.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Run the suite against a deliberately broken group law.
    #[arg(long, hide = true)]
    corrupt_law: bool,
}

#[derive(Args, Debug)]
struct TubesOpts {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    box_scale: Option<f64>,
}

#[derive(Args, Debug)]
struct ProjectionOpts {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    box_scale: Option<f64>,
    /// Pair count N; the sup ratio is compared between N and 10N pairs.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    split_trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct BetaOpts {
    /// fig1, fig2 or fig3.
    #[arg(long)]
    figure: Option<Figure>,
    /// A single formula instead of a figure: main, euclidean, foliation, construction.
    #[arg(long)]
    formula: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Ambient dimension Q of the foliation bound.
    #[arg(long)]
    q: Option<f64>,
    /// Leaf dimension s of the foliation bound.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args, Debug)]
struct DistortOpts {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    cosets: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated list of map seeds.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Single map seed; shorthand for `--seeds N`.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    #[arg(long)]
    controls: Option<usize>,
}

#[derive(Args, Debug)]
struct SobolevOpts {
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    s.split(',').map(|x| x.trim().parse().with_context(|| format!("bad seed {x:?}"))).collect()
}

enum Output {
    Report(ExperimentReport),
    Curves(beta::FigureData),
}

fn run_cmd(cmd: Cmd, cfg: &Config, th: &Thresholds) -> Result<Output> {
    let out = match cmd {
        Cmd::Axioms(o) => {
            let n = match o.n {
                Some(n) => Some(n),
                None => cfg.raw("n").map(str::parse).transpose()?,
            };
            let args = AxiomsArgs {
                n,
                trials: cfg.pick(o.trials, "trials", 100_000)?,
                seed: cfg.pick(o.seed, "seed", 0)?,
                law: if o.corrupt_law { axioms::corrupted_law } else { axioms::standard_law },
            };
            Output::Report(axioms::run(&args, th)?)
        }
        Cmd::Tubes(o) => Output::Report(tubes::run(
            &TubesArgs {
                n: cfg.pick(o.n, "n", 1)?,
                m: cfg.pick(o.m, "m", 1)?,
                trials: cfg.pick(o.trials, "trials", 20_000)?,
                seed: cfg.pick(o.seed, "seed", 0)?,
                box_scale: cfg.pick(o.box_scale, "box-scale", 1.0)?,
            },
            th,
        )?),
        Cmd::Projection(o) => Output::Report(projection::run(
            &ProjectionArgs {
                n: cfg.pick(o.n, "n", 1)?,
                m: cfg.pick(o.m, "m", 1)?,
                box_scale: cfg.pick(o.box_scale, "box-scale", 1.0)?,
                trials: cfg.pick(o.trials, "trials", 10_000)?,
                split_trials: cfg.pick(o.split_trials, "split-trials", 100_000)?,
                seed: cfg.pick(o.seed, "seed", 0)?,
            },
            th,
        )?),
        Cmd::Beta(o) => {
            let points = cfg.pick(o.points, "points", 101)?;
            let formula = match o.formula {
                Some(f) => Some(f),
                None => cfg.raw("formula").map(str::to_string),
            };
            let plot = if let Some(f) = formula {
                let n = cfg.pick(o.n, "n", 1)?;
                let m = cfg.pick(o.m, "m", 1)?;
                let p = cfg.pick(o.p, "p", 6.0)?;
                match f.as_str() {
                    "main" => Plot::Formula(Formula::Main { n, m, p }),
                    "euclidean" => Plot::Formula(Formula::Euclidean { n, m, p }),
                    "foliation" => Plot::Formula(Formula::Foliation {
                        q: cfg.pick(o.q, "q", (2 * n + 2) as f64)?,
                        s: cfg.pick(o.s, "s", (m + 1) as f64)?,
                        p,
                    }),
                    "construction" => Plot::Formula(Formula::Construction { p }),
                    other => bail!("unknown formula {other}"),
                }
            } else {
                let figure = match o.figure {
                    Some(f) => f,
                    None => cfg.raw("figure").context("give --figure or --formula")?.parse()?,
                };
                let n_default = if figure == Figure::Fig3 { 2 } else { 1 };
                Plot::Figure {
                    figure,
                    n: cfg.pick(o.n, "n", n_default)?,
                    m: cfg.pick(o.m, "m", 1)?,
                    p: cfg.pick(o.p, "p", 6.0)?,
                }
            };
            Output::Curves(beta::curves(&plot, points)?)
        }
        Cmd::Distort(o) => {
            let seeds = match (o.seeds, o.seed) {
                (Some(s), _) => s,
                (None, Some(s)) => vec![s],
                (None, None) => match (cfg.raw("seeds"), cfg.raw("seed")) {
                    (Some(s), _) => parse_seeds(s)?,
                    (None, Some(s)) => parse_seeds(s)?,
                    (None, None) => vec![1, 2, 3],
                },
            };
            Output::Report(distort::run(
                &DistortArgs {
                    p: cfg.pick(o.p, "p", 6.0)?,
                    alpha: cfg.pick(o.alpha, "alpha", 1.2)?,
                    depth: cfg.pick(o.depth, "depth", 6)?,
                    cosets: cfg.pick(o.cosets, "cosets", 20)?,
                    samples: cfg.pick(o.samples, "samples", 4096)?,
                    seeds,
                    controls: cfg.pick(o.controls, "controls", 4)?,
                },
                th,
            )?)
        }
        Cmd::Sobolev(o) => Output::Report(sobolev::run(
            &SobolevArgs {
                p: cfg.pick(o.p, "p", 6.0)?,
                alpha: cfg.pick(o.alpha, "alpha", 1.2)?,
                depth: cfg.pick(o.depth, "depth", 5)?,
                mc_samples: cfg.pick(o.mc_samples, "mc-samples", 100_000)?,
                seed: cfg.pick(o.seed, "seed", 0)?,
            },
            th,
        )?),
    };
    Ok(out)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Exit code 0 when every check passes, 1 on a violated check.
fn execute(cli: Cli) -> Result<u8> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let format = cfg.pick(cli.format, "format", Format::Json)?;
    let out = cli.out.clone().or_else(|| cfg.raw("out").map(PathBuf::from));
    let th = Thresholds::defaults();
    let start = Instant::now();
    match run_cmd(cli.cmd, &cfg, &th)? {
        Output::Curves(data) => {
            let text = match format {
                Format::Json => beta::to_json(&data),
                Format::Csv => beta::to_csv(&data)?,
            };
            emit(&text, out.as_ref())?;
            Ok(0)
        }
        Output::Report(mut rep) => {
            if !cli.reproducible {
                rep.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            let text = match format {
                Format::Json => rep.to_json(),
                Format::Csv => rep.records_csv()?,
            };
            emit(&text, out.as_ref())?;
            for c in &rep.checks {
                eprintln!("{}", c.line());
            }
            for r in rep.records.iter().filter(|r| r.contains_key("counterexample") || r.contains_key("case")) {
                eprintln!("counterexample: {}", serde_json::Value::Object(r.clone()));
            }
            Ok(if rep.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
