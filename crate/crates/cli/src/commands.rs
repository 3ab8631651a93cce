use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use newtonlab::basin::{
    aggregate, direction_field, field_csv, format_table, render_basin, sample_basins, sample_labels, trajectory_comparison, BasinGrid,
    PerformanceTable, RenderOptions, STATS_CSV_HEADER,
};
use newtonlab::benchmark::{parse_benchmark_with, Benchmark, BenchmarkOptions};
use newtonlab::report::{to_json, FlowDocument, TraceDocument};
use newtonlab::{flow, solve, FlowConfig, Mode, Rect};

use crate::args::{
    BasinArgs, Cli, Command, CompareArgs, FieldArgs, FlowArgs, GridArgs, ProblemArgs, SolveArgs, StartArgs, TableArgs,
};

#[derive(Debug)]
pub enum CliError {
    /// Bad input: exit code 2.
    Usage(String),
    /// Failure while running: exit code 1.
    Runtime(String),
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: Cli) -> Result<()> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Flow(a) => cmd_flow(a),
        Command::Basin(a) => cmd_basin(a),
        Command::Table(a) => cmd_table(a),
        Command::Field(a) => cmd_field(a),
        Command::Compare(a) => cmd_compare(a),
    })
}

fn is_pde(id: &str) -> bool {
    id.trim().starts_with("cubic-pde")
}

fn load(p: &ProblemArgs) -> Result<Box<dyn Benchmark>> {
    if !is_pde(&p.problem) && (p.slice.is_some() || p.amplitude_bound.is_some()) {
        return Err(CliError::Usage("--slice and --amplitude-bound apply to cubic-pde only".into()));
    }
    let defaults = BenchmarkOptions::default();
    let opts = BenchmarkOptions {
        slice: p.slice.unwrap_or(defaults.slice),
        amplitude_bound: p.amplitude_bound.unwrap_or(defaults.amplitude_bound),
    };
    parse_benchmark_with(&p.problem, &opts).map_err(|e| CliError::Usage(e.to_string()))
}

/// Initial state for a start given on the command line.
fn start_state(bench: &dyn Benchmark, start: &StartArgs) -> Vec<f64> {
    let (a, b) = start.x0;
    if bench.is_planar() {
        vec![a, b]
    } else {
        bench.initial_guess(a, b)
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::Runtime(format!("cannot write output: {e}")))
        }
    }
}

fn label_name(bench: &dyn Benchmark, label: Option<usize>) -> Option<String> {
    label.map(|l| bench.label_names()[l].clone())
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let bench = load(&a.problem)?;
    let x0 = start_state(bench.as_ref(), &a.start);
    let mut cfg = bench.solver_config(a.mode);
    if let Some(m) = a.max_iters {
        cfg = cfg.with_max_iters(m);
    }
    if let Some(t) = a.update_tol {
        cfg = cfg.with_update_tol(t);
    }
    let trace = solve(bench.problem(), &x0, &cfg);
    let label = if trace.converged() { bench.classify(trace.final_state()) } else { None };
    let doc = TraceDocument::new(&bench.id(), a.mode, &trace, label_name(bench.as_ref(), label));
    write_output(a.out.as_deref(), (to_json(&doc) + "\n").as_bytes())
}

fn cmd_flow(a: FlowArgs) -> Result<()> {
    let bench = load(&a.problem)?;
    let x0 = start_state(bench.as_ref(), &a.start);
    let cfg = FlowConfig { dt: a.dt, t_max: a.t_max, ..FlowConfig::default() };
    let traj = flow(bench.problem(), &x0, &cfg);
    let label = if traj.converged() { bench.classify(traj.final_state()) } else { None };
    let doc = FlowDocument::new(&bench.id(), &traj, label_name(bench.as_ref(), label));
    write_output(a.out.as_deref(), (to_json(&doc) + "\n").as_bytes())
}

/// Rectangle and resolution after applying defaults.
fn resolve_grid(bench: &dyn Benchmark, g: &GridArgs) -> Result<(Rect, usize, usize)> {
    let rect = g.rect.unwrap_or_else(|| bench.default_rect());
    let (nx, mut ny) = g.res.unwrap_or_else(|| bench.default_resolution(g.paper_scale));
    let id = bench.id();
    let mesh_step = id.strip_prefix("cubic-pde:n=").and_then(|n| n.parse::<f64>().ok()).map(|n| 1.0 / n);
    let step = match (g.amplitude_step, mesh_step) {
        (Some(_), None) => return Err(CliError::Usage("--amplitude-step applies to cubic-pde only".into())),
        (Some(s), Some(_)) => Some(s),
        (None, Some(h)) if g.paper_scale && g.res.is_none() => Some(h),
        _ => None,
    };
    if let Some(s) = step {
        ny = ((rect.y1 - rect.y0) / s).round() as usize + 1;
        if ny < 2 {
            return Err(CliError::Usage("--amplitude-step is larger than the amplitude range".into()));
        }
    }
    Ok((rect, nx, ny))
}

fn cells_csv(grid: &BasinGrid) -> String {
    let name = |l: Option<usize>| l.map(|i| grid.labels[i].as_str()).unwrap_or("");
    let mut out = String::from("ix,iy,s,t,label,status,iterations,final_step,oracle,correct\n");
    for iy in 0..grid.plan.ny {
        for ix in 0..grid.plan.nx {
            let c = grid.cell(ix, iy);
            let (s, t) = grid.plan.point(ix, iy);
            let _ = writeln!(
                out,
                "{ix},{iy},{s},{t},{},{},{},{},{},{}",
                name(c.label),
                c.status.as_str(),
                c.iterations,
                c.final_step,
                name(c.oracle),
                c.correct as u8
            );
        }
    }
    out
}

fn summary_line(t: &PerformanceTable) -> String {
    format!(
        "convergent {}/{} ({:.1}%), converged-any {}, incorrect-zero {}, oracle-undefined {}",
        t.convergent,
        t.total - t.oracle_undefined,
        t.pct_convergent,
        t.converged_any,
        t.incorrect_zero,
        t.oracle_undefined
    )
}

fn cmd_basin(a: BasinArgs) -> Result<()> {
    let bench = load(&a.problem)?;
    let (rect, nx, ny) = resolve_grid(bench.as_ref(), &a.grid)?;
    let solver = bench.solver_config(a.mode);
    let grid = if a.no_oracle {
        sample_labels(bench.as_ref(), rect, nx, ny, &solver)
    } else {
        sample_basins(bench.as_ref(), rect, nx, ny, &[solver], &bench.default_oracle()).remove(0)
    };
    let table = aggregate(&grid);
    if let Some(path) = &a.out {
        let opts = RenderOptions { shade_iterations: a.shade, markers: !a.no_markers, ..RenderOptions::default() };
        write_output(Some(path), &render_basin(&grid, &opts).to_ppm())?;
    }
    if let Some(path) = &a.stats {
        write_output(Some(path), table.csv().as_bytes())?;
    }
    if let Some(path) = &a.cells {
        write_output(Some(path), cells_csv(&grid).as_bytes())?;
    }
    let summary = if a.no_oracle { format!("converged {}/{} (no oracle)", table.converged_any, table.total) } else { summary_line(&table) };
    println!("{} {} {}x{}: {summary}", bench.id(), a.mode, nx, ny);
    Ok(())
}

/// Table columns per problem: classical, a fixed damped step where one is customary, adaptive.
fn default_modes(id: &str) -> Vec<Mode> {
    let fixed = match id {
        "cubic" => Some(Mode::Fixed { t: 0.72 }),
        "expsin" => Some(Mode::Fixed { t: 0.917 }),
        _ => None,
    };
    std::iter::once(Mode::Classical).chain(fixed).chain(std::iter::once(Mode::Adaptive { tau: 0.1 })).collect()
}

fn cmd_table(a: TableArgs) -> Result<()> {
    let bench = load(&a.problem)?;
    let (rect, nx, ny) = resolve_grid(bench.as_ref(), &a.grid)?;
    let modes = if a.modes.is_empty() { default_modes(&bench.id()) } else { a.modes.clone() };
    let solvers: Vec<_> = modes.iter().map(|m| bench.solver_config(*m)).collect();
    let grids = sample_basins(bench.as_ref(), rect, nx, ny, &solvers, &bench.default_oracle());
    let columns: Vec<(String, PerformanceTable)> = modes.iter().zip(&grids).map(|(m, g)| (m.to_string(), aggregate(g))).collect();
    println!("{} on [{}, {}] x [{}, {}], {nx}x{ny} starts", bench.id(), rect.x0, rect.x1, rect.y0, rect.y1);
    print!("{}", format_table(&columns));
    println!();
    for (name, t) in &columns {
        println!("{name}: {}", summary_line(t));
    }
    if let Some(path) = &a.csv {
        let mut out = format!("mode,{STATS_CSV_HEADER},converged_any,incorrect_zero,oracle_undefined,total\n");
        for (name, t) in &columns {
            let _ = writeln!(
                out,
                "{name},{:.6},{:.6},{:.6},{:.6},{},{},{},{}",
                t.avg_iterations, t.avg_step_size, t.pct_convergent, t.avg_rate, t.converged_any, t.incorrect_zero, t.oracle_undefined, t.total
            );
        }
        write_output(Some(path), out.as_bytes())?;
    }
    Ok(())
}

fn cmd_field(a: FieldArgs) -> Result<()> {
    let bench = load(&a.problem)?;
    if !bench.is_planar() {
        return Err(CliError::Usage(format!("direction fields need a planar problem, `{}` is not", bench.id())));
    }
    let rect = a.rect.unwrap_or_else(|| bench.default_rect());
    let samples = direction_field(bench.problem(), rect, a.res.0, a.res.1, a.kind);
    write_output(a.out.as_deref(), field_csv(&samples).as_bytes())
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let bench = load(&a.problem)?;
    let x0 = start_state(bench.as_ref(), &a.start);
    let cfg = FlowConfig { dt: a.dt, ..FlowConfig::default() };
    let cmp = trajectory_comparison(bench.as_ref(), &x0, a.tau, &cfg);
    let csv = a.out.as_deref().and_then(|p| p.extension()).is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let body = if csv { cmp.to_csv() } else { cmp.to_json() + "\n" };
    write_output(a.out.as_deref(), body.as_bytes())?;
    if a.out.is_some() {
        let show = |l: Option<&str>| l.unwrap_or("none").to_string();
        println!(
            "classical -> {}, adaptive -> {}, flow -> {}",
            show(cmp.classical_label()),
            show(cmp.adaptive_label()),
            show(cmp.flow_label())
        );
    }
    Ok(())
}
