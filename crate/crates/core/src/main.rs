use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use twospecies::error::{Error, Result};
use twospecies::harness::{
    aggregate, load_config, parse_config, run_pdmp_sweep, run_scheme_sweep, run_validation,
    write_results, ExperimentConfig,
};
use twospecies::pdmp::{pdmp_run, write_event_log, ParticleState};
use twospecies::scheme::{scheme_init, scheme_run, write_snapshots_csv};

#[derive(Parser)]
#[command(
    name = "twospecies",
    version,
    about = "Two-species coarsening particle system: kinetic solver, bin discretization, event-driven simulator, and convergence sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the kinetic equations and dump the (t, a, L, N2) grid
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config's output_dir)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print a(t), L(t), N2(t) at this time (repeatable)
        #[arg(long)]
        probe: Vec<f64>,
    },
    /// Run the bin discretization and dump per-step snapshots
    Scheme {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single particle-system run with a printed and dumped event log
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Particle count (overrides the first n_list entry)
        #[arg(long)]
        n: Option<usize>,
        /// Master seed override
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discretization-vs-solution sweep over the delta list
    SweepScheme {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Particle-vs-solution Monte Carlo sweep over the n list
    SweepPdmp {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in invariant suite and report pass/fail per check
    Validate {
        /// Also load and validate this config file
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // Die quietly when a pipeline consumer closes stdout early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) | Error::Degenerate(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn effective_out(cfg: &ExperimentConfig, out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| cfg.output_dir.clone())
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve { config, out, probe } => {
            let cfg = load_config(&config)?;
            let ic = cfg.initial_condition()?;
            let sol = cfg.solve_kinetic(&ic)?;
            let out_dir = effective_out(&cfg, out);
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            let path = out_dir.join("solution.csv");
            let mut body = String::from("t,a,loss,n2\n");
            let h = sol.removal_rate().step();
            for (i, (a, l)) in sol
                .removal_rate()
                .values()
                .iter()
                .zip(sol.loss().values())
                .enumerate()
            {
                let t = i as f64 * h;
                body.push_str(&format!("{t},{a},{l},{}\n", sol.n2_zero() - l));
            }
            std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            println!("solution grid written to {}", path.display());
            println!(
                "N2(0) = {}, horizon = {}, blow-up (N2 -> 0) >= {}",
                sol.n2_zero(),
                sol.horizon(),
                sol.blowup_time(0.0)
            );
            for t in probe {
                if t >= sol.horizon() {
                    println!("t = {t}: beyond horizon");
                    continue;
                }
                let a = sol.removal_rate().eval(t);
                let loss = sol.n2_zero() - sol.n2_at(t);
                println!("a({t}) = {a}, L({t}) = {loss}, N2({t}) = {}", sol.n2_at(t));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Scheme { config, out } => {
            let cfg = load_config(&config)?;
            let ic = cfg.initial_condition()?;
            if cfg.delta_list.is_empty() {
                return Err(Error::Config(
                    "scheme subcommand needs a nonempty delta_list".into(),
                ));
            }
            let out_dir = effective_out(&cfg, out);
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            for &delta in &cfg.delta_list {
                let s0 = scheme_init(&ic, delta)?;
                let snaps = scheme_run(&s0, cfg.t_end)?;
                let path = out_dir.join(format!("scheme_delta_{delta}.csv"));
                let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
                write_snapshots_csv(&snaps, std::io::BufWriter::new(file))
                    .map_err(|e| Error::io(&path, e))?;
                println!(
                    "delta = {delta}: {} steps, N2(t_end) = {}, wrote {}",
                    snaps.len() - 1,
                    snaps.last().unwrap().n2(),
                    path.display()
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            config,
            n,
            seed,
            out,
        } => {
            // A bare simulation never consumes the kinetic reference, so the
            // run may extend past the kinetic blow-up time.
            let cfg = parse_config(&config)?;
            cfg.validate_basic()?;
            let ic = cfg.initial_condition()?;
            let n = n
                .or_else(|| cfg.n_list.first().copied())
                .ok_or_else(|| Error::Config("no particle count: pass --n or set n_list".into()))?;
            let seed = seed.unwrap_or(cfg.master_seed);
            let mut state = ParticleState::init(&ic, n, seed, 0)?;
            let times = cfg.snapshot_times();
            let run = pdmp_run(&mut state, cfg.t_end, &times)?;
            print_event_log(&state);
            println!(
                "final: t = {}, |S1| = {}, |S2| = {}, removals = {}, loss = {}{}",
                state.time(),
                state.s1_len(),
                state.s2_len(),
                state.removal_count(),
                state.loss_count(state.time())?,
                if run.cemetery { ", cemetery" } else { "" }
            );
            let out_dir = effective_out(&cfg, out);
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            let path = out_dir.join("events.csv");
            let file = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            write_event_log(&state, std::io::BufWriter::new(file))
                .map_err(|e| Error::io(&path, e))?;
            println!("event log written to {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepScheme {
            config,
            workers,
            seed,
            out,
        } => {
            let cfg = override_seed(load_config(&config)?, seed);
            let records = with_pool(workers, || run_scheme_sweep(&cfg))??;
            let out_dir = effective_out(&cfg, out);
            write_results(&records, &cfg, &out_dir)?;
            for r in &records {
                println!(
                    "delta = {}: sup_t d = {} ({} ms)",
                    r.param_value, r.sup_distance, r.runtime_ms
                );
            }
            println!("results written to {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::SweepPdmp {
            config,
            workers,
            seed,
            out,
        } => {
            let cfg = override_seed(load_config(&config)?, seed);
            let records = with_pool(workers, || run_pdmp_sweep(&cfg))??;
            let out_dir = effective_out(&cfg, out);
            write_results(&records, &cfg, &out_dir)?;
            for a in aggregate(&records, &cfg.eps_list) {
                let tails: Vec<String> = a
                    .tail_fractions
                    .iter()
                    .map(|(e, f)| format!("P(sup >= {e}) = {f}"))
                    .collect();
                println!(
                    "n = {}: median = {}, mean = {}, cemetery = {}{}{}",
                    a.param_value,
                    a.median_sup,
                    a.mean_sup,
                    a.cemetery_count,
                    if tails.is_empty() { "" } else { ", " },
                    tails.join(", ")
                );
            }
            println!("results written to {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { config } => {
            let mut all_ok = true;
            if let Some(path) = config {
                match load_config(&path) {
                    Ok(_) => println!("[PASS] config.load: {}", path.display()),
                    Err(e) => {
                        all_ok = false;
                        println!("[FAIL] config.load: {e}");
                    }
                }
            }
            for check in run_validation() {
                let tag = if check.passed { "PASS" } else { "FAIL" };
                println!("[{tag}] {}: {}", check.name, check.detail);
                all_ok &= check.passed;
            }
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn override_seed(cfg: ExperimentConfig, seed: Option<u64>) -> ExperimentConfig {
    match seed {
        Some(s) => ExperimentConfig {
            master_seed: s,
            ..cfg
        },
        None => cfg,
    }
}

fn print_event_log(state: &ParticleState) {
    let mutations = state.mutation_log();
    for (i, t) in state.removal_times().iter().enumerate() {
        match mutations.get(i) {
            Some(m) => println!(
                "event {}: removal at t = {t}, mutation at position {}",
                i + 1,
                m.position
            ),
            None => println!(
                "event {}: removal at t = {t}, species 2 exhausted -> cemetery",
                i + 1
            ),
        }
    }
}
