use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use crossroads::sim::{export, plan, run_experiment, CorridorScenario, FlowMix, Scenario, Strategy};
use crossroads::{Error, Result};

#[derive(Parser)]
#[command(name = "crossroads", version, about = "Space-time scheduling and trajectory refinement at a four-way intersection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file (TOML). Defaults to the built-in setup.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// `proposed` or `cs`.
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for candidate scoring and refinement.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the high-level scheduler only.
    Plan(Common),
    /// Refine one trajectory around obstacles inside its tunnel.
    Refine(Common),
    /// Closed-loop simulation with noise.
    Simulate(Common),
    /// Timing sweep of both planners.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Largest number of vehicles in the sweep.
        #[arg(long, default_value_t = 40)]
        vehicles: usize,
    },
    /// Proposed strategy against the collision-set baseline.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Number of seeds per flow.
        #[arg(long, default_value_t = 20)]
        runs: u64,
    },
}

impl Common {
    fn scenario(&self) -> Result<Scenario> {
        let mut s = match &self.scenario {
            Some(p) => Scenario::load(p)?,
            None => Scenario::default(),
        };
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(st) = self.strategy {
            s.strategy = st;
        }
        s.planner.parallel = self.threads > 1;
        Ok(s)
    }

    fn out_dir(&self) -> Result<Option<PathBuf>> {
        if let Some(d) = &self.out {
            std::fs::create_dir_all(d).map_err(|e| Error::Io {
                path: d.clone(),
                source: e,
            })?;
        }
        Ok(self.out.clone())
    }
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let to_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    };
    let mut w = csv::Writer::from_path(path).map_err(to_err)?;
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(r).map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn cmd_plan(c: &Common) -> Result<bool> {
    let s = c.scenario()?;
    let requests = s.requests()?;
    let (schedule, ms) = plan(&s, s.strategy, &requests)?;
    println!(
        "{} vehicles scheduled ({}), total passing time {:.2} s, makespan {:.2} s, {ms:.1} ms",
        schedule.allocations.len(),
        s.strategy,
        schedule.total_passing_time(),
        schedule.makespan()
    );
    for a in &schedule.allocations {
        println!(
            "  vehicle {:3} road {} {:8} t_e {:7.2} exit {:7.2}",
            a.vehicle(),
            a.request.road_from,
            a.request.maneuver.as_str(),
            a.t_e,
            a.exit_time()
        );
    }
    let disjoint = schedule.pairwise_disjoint()?;
    if let Some(dir) = c.out_dir()? {
        let path = dir.join("schedule.csv");
        let f = std::fs::File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        schedule
            .write_csv(f)
            .map_err(|e| Error::Csv { path: path.clone(), source: e })?;
        for t in &schedule.tunnels {
            t.cells.save_csv(&dir.join(format!("tunnel_{:03}.csv", t.vehicle)))?;
        }
    }
    println!("pairwise disjoint: {disjoint}");
    Ok(disjoint && schedule.allocations.len() == requests.len())
}

fn cmd_refine(c: &Common) -> Result<bool> {
    let s = match &c.scenario {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Io { path: p.clone(), source: e })?;
            toml::from_str::<CorridorScenario>(&text)?
        }
        None => CorridorScenario::default(),
    };
    let out = s.run()?;
    let r = &out.refinement;
    println!(
        "{:?}: {} control points, {} iterations, {} re-weightings, cost {:.4} -> {:.4}, {:.1} ms",
        r.status,
        r.control_points.len(),
        r.iterations,
        r.reweights,
        r.initial_cost,
        r.final_cost,
        r.elapsed_ms
    );
    println!(
        "obstacle hits {}, cells outside tunnel {}, peak speed {:.2} m/s, peak lateral {:.2} m/s^2",
        r.check.obstacle_hits, r.check.outside_tunnel, r.check.max_speed, r.check.max_lateral_accel
    );
    if let Some(dir) = c.out_dir()? {
        let path = dir.join("refined.csv");
        let f = std::fs::File::create(&path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        r.control_points
            .write_csv(f, 0.05)
            .map_err(|e| Error::Csv { path: path.clone(), source: e })?;
        let rows: Vec<Vec<String>> = r
            .log
            .iter()
            .map(|l| {
                vec![
                    l.run.to_string(),
                    l.iter.to_string(),
                    format!("{:.6}", l.cost),
                    format!("{:.6}", l.smoothness),
                    format!("{:.6}", l.collision),
                    format!("{:.6}", l.grad_norm),
                ]
            })
            .collect();
        write_csv(
            &dir.join("iterations.csv"),
            &["run", "iter", "cost", "smoothness", "collision", "grad_norm"],
            &rows,
        )?;
        out.grid.real.save_csv(&dir.join("obstacles.csv"))?;
        out.tunnel.save_csv(&dir.join("tunnel.csv"))?;
    }
    Ok(r.check.collision_free())
}

fn cmd_simulate(c: &Common) -> Result<bool> {
    let s = c.scenario()?;
    let r = run_experiment(&s, s.strategy)?;
    let m = &r.metrics;
    println!(
        "{}: {}/{} scheduled, total passing time {:.2} s, mean wait {:.2} s, collisions {}, incidents {}, max tracking error {:.3} m",
        m.strategy, m.scheduled, m.vehicles, m.total_passing_time, m.mean_wait, m.collisions, m.incidents, m.max_tracking_error
    );
    if let Some(dir) = c.out_dir()? {
        let files = export(&r, &s, &dir)?;
        println!("wrote {} files to {}", files.len(), dir.display());
    }
    Ok(r.success())
}

fn cmd_bench(c: &Common, max_vehicles: usize) -> Result<bool> {
    let base = c.scenario()?;
    let mut rows = Vec::new();
    println!("{:>6} {:>8} {:>10} {:>10} {:>10}", "flow", "vehicles", "round_mean", "round_max", "total_ms");
    for (name, mix) in [("flow1", FlowMix::flow1()), ("flow2", FlowMix::flow2())] {
        for n in (10..=max_vehicles.max(10)).step_by(10) {
            let mut s = base.clone();
            s.traffic.mix = mix;
            s.traffic.vehicles = n;
            s.traffic.requests.clear();
            let requests = s.requests()?;
            let (schedule, total) = plan(&s, Strategy::Proposed, &requests)?;
            let mean = schedule.round_ms.iter().sum::<f64>() / schedule.round_ms.len().max(1) as f64;
            let max = schedule.round_ms.iter().copied().fold(0.0, f64::max);
            println!("{name:>6} {n:>8} {mean:>10.3} {max:>10.3} {total:>10.1}");
            rows.push(vec![name.into(), n.to_string(), format!("{mean:.6}"), format!("{max:.6}"), format!("{total:.6}")]);
        }
    }
    let started = Instant::now();
    let corridor = CorridorScenario::default().run()?;
    let wall = started.elapsed().as_secs_f64() * 1e3;
    println!(
        "low-level: {} control points, optimisation {:.1} ms (with setup {wall:.1} ms)",
        corridor.refinement.control_points.len(),
        corridor.refinement.elapsed_ms
    );
    if let Some(dir) = c.out_dir()? {
        write_csv(
            &dir.join("bench.csv"),
            &["flow", "vehicles", "round_ms_mean", "round_ms_max", "schedule_ms"],
            &rows,
        )?;
    }
    Ok(true)
}

fn cmd_compare(c: &Common, runs: u64) -> Result<bool> {
    let base = c.scenario()?;
    let mut rows = Vec::new();
    let mut dominated = true;
    for (name, mix) in [("flow1", FlowMix::flow1()), ("flow2", FlowMix::flow2())] {
        let mut gains = Vec::new();
        for k in 0..runs {
            let mut s = base.clone();
            s.seed = base.seed + k;
            s.traffic.mix = mix;
            s.traffic.requests.clear();
            let requests = s.requests()?;
            let (p, _) = plan(&s, Strategy::Proposed, &requests)?;
            let (cs, _) = plan(&s, Strategy::Cs, &requests)?;
            let (tp, tc) = (p.total_passing_time(), cs.total_passing_time());
            dominated &= tp <= tc + 1e-9;
            gains.push((tc - tp) / tc);
            rows.push(vec![name.into(), s.seed.to_string(), format!("{tp:.6}"), format!("{tc:.6}")]);
        }
        let mean = gains.iter().sum::<f64>() / gains.len().max(1) as f64;
        let positive = gains.iter().filter(|g| **g > 0.0).count();
        println!(
            "{name}: mean improvement {:.1}% over {} runs ({} strictly better)",
            mean * 100.0,
            gains.len(),
            positive
        );
    }
    println!("proposed never worse than collision-set: {dominated}");
    if let Some(dir) = c.out_dir()? {
        write_csv(
            &dir.join("compare.csv"),
            &["flow", "seed", "proposed_s", "cs_s"],
            &rows,
        )?;
    }
    Ok(dominated)
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Plan(c) | Command::Refine(c) | Command::Simulate(c) => c,
        Command::Bench { common, .. } | Command::Compare { common, .. } => common,
    };
    if common.threads > 1 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(common.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.command {
        Command::Plan(c) => cmd_plan(c),
        Command::Refine(c) => cmd_refine(c),
        Command::Simulate(c) => cmd_simulate(c),
        Command::Bench { common, vehicles } => cmd_bench(common, *vehicles),
        Command::Compare { common, runs } => cmd_compare(common, *runs),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
