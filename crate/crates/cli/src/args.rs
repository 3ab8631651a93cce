use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use newtonlab::basin::FieldKind;
use newtonlab::{Mode, Rect};

#[derive(Debug, Parser)]
#[command(name = "newtonlab", version, about = "Adaptive step-size Newton method and basin-of-attraction laboratory")]
pub struct Cli {
    /// Worker threads for sampling (default: all cores).
    #[arg(long, global = true, env = "NEWTONLAB_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one Newton iteration and print its trace as JSON.
    Solve(SolveArgs),
    /// Integrate the continuous Newton flow from one start.
    Flow(FlowArgs),
    /// Sample a basin-of-attraction grid and render it.
    Basin(BasinArgs),
    /// Print the performance table for several step-size modes.
    Table(TableArgs),
    /// Export the direction field of F or of the Newton update.
    Field(FieldArgs),
    /// Classical, adaptive and flow trajectories from one start.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// cubic, expsin, cubic-bvp[:n=N], bratu[:n=N] or cubic-pde[:n=N].
    #[arg(long)]
    pub problem: String,

    /// Hill peak row as a fraction of the side (cubic-pde only).
    #[arg(long, value_parser = parse_fraction)]
    pub slice: Option<f64>,

    /// Hill amplitudes range over [-c, c] (cubic-pde only).
    #[arg(long, value_parser = parse_positive)]
    pub amplitude_bound: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StartArgs {
    /// Start point. The state itself for cubic and expsin, otherwise the
    /// parameter pair (position, amplitude) of the initial guess.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub x0: (f64, f64),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub start: StartArgs,
    /// classical, fixed:<t> or adaptive:<tau>.
    #[arg(long, default_value = "adaptive:0.1", value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, value_parser = parse_positive)]
    pub update_tol: Option<f64>,
    /// Write the JSON here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub start: StartArgs,
    #[arg(long, default_value_t = newtonlab::flow::DEFAULT_FLOW_DT, value_parser = parse_positive)]
    pub dt: f64,
    #[arg(long, default_value_t = newtonlab::flow::DEFAULT_FLOW_T_MAX, value_parser = parse_positive)]
    pub t_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Parameter rectangle x0,x1,y0,y1 (default: the problem's).
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    pub rect: Option<Rect>,
    /// Grid resolution nx,ny.
    #[arg(long, value_parser = parse_resolution)]
    pub res: Option<(usize, usize)>,
    /// Use the full-size resolutions (1001², 400², 500²) instead of the desk-scale defaults.
    #[arg(long)]
    pub paper_scale: bool,
    /// Amplitude spacing of cubic-pde rows; overrides the row count of --res.
    /// With --paper-scale it defaults to 1/n.
    #[arg(long, value_parser = parse_positive)]
    pub amplitude_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BasinArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "adaptive:0.1", value_parser = parse_mode)]
    pub mode: Mode,
    /// Image output (binary PPM).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Statistics row as CSV.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// One CSV row per cell.
    #[arg(long)]
    pub cells: Option<PathBuf>,
    /// Darken pixels by iteration count.
    #[arg(long)]
    pub shade: bool,
    /// Leave out the root markers.
    #[arg(long)]
    pub no_markers: bool,
    /// Skip the flow oracle. Much faster; only the image and the per-cell
    /// labels are meaningful, so --stats is refused.
    #[arg(long, conflicts_with = "stats")]
    pub no_oracle: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Comma-separated modes, one column each (default: classical, fixed and adaptive).
    #[arg(long, value_delimiter = ',', value_parser = parse_mode)]
    pub modes: Vec<Mode>,
    /// Also write one CSV statistics row per mode.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
    pub rect: Option<Rect>,
    #[arg(long, default_value = "21,21", value_parser = parse_resolution)]
    pub res: (usize, usize),
    /// raw (F itself) or nrt (the Newton update).
    #[arg(long, default_value = "nrt")]
    pub kind: FieldKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub start: StartArgs,
    #[arg(long, default_value_t = 0.1, value_parser = parse_positive)]
    pub tau: f64,
    #[arg(long, default_value_t = newtonlab::flow::DEFAULT_FLOW_DT, value_parser = parse_positive)]
    pub dt: f64,
    /// Output file; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list(s: &str, len: usize) -> Result<Vec<f64>, String> {
    let values = s.split(',').map(parse_number).collect::<Result<Vec<_>, _>>()?;
    if values.len() != len {
        return Err(format!("expected {len} comma-separated numbers, got {}", values.len()));
    }
    Ok(values)
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let v = parse_list(s, 2)?;
    Ok((v[0], v[1]))
}

pub fn parse_rect(s: &str) -> Result<Rect, String> {
    let v = parse_list(s, 4)?;
    let r = Rect::new(v[0], v[1], v[2], v[3]);
    if r.is_valid() {
        Ok(r)
    } else {
        Err("rectangle must satisfy x0 < x1 and y0 < y1".into())
    }
}

pub fn parse_resolution(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts[..] else {
        return Err("expected nx,ny".into());
    };
    let n = |p: &str| p.trim().parse::<usize>().map_err(|_| format!("`{p}` is not a positive integer"));
    let (nx, ny) = (n(a)?, n(b)?);
    if nx < 2 || ny < 2 {
        return Err("resolution must be at least 2 along each axis".into());
    }
    Ok((nx, ny))
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: newtonlab::solver::ModeParseError| e.to_string())
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let v = parse_number(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("expected a value in (0, 1), got {v}"))
    }
}
