use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use roster_core::oracle::{oracle_balanced_plan, oracle_decide_basic, OracleLimits};
use roster_core::pebble::{
    expected_visits, lift_component, periodic_color_sequence, simulate_random_colors, validate_colored_graph,
    visit_frequencies, ColoredGraph, DEFAULT_LIFT_CAP,
};
use roster_core::render::{render_ascii, render_svg};
use roster_core::{
    balance_profile, decide, feasible, feasible_plan, is_balanced, is_feasible, min_workers, solve, Instance,
    PeriodicAssignment, RosterError,
};

const YES: u8 = 0;
const NO: u8 = 1;
const INVALID: u8 = 2;

#[derive(Parser)]
#[command(name = "roster", version, about = "Balanced periodic assignment of weekly tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and print the violations found.
    Validate { instance: PathBuf },
    /// Whether any feasible assignment exists.
    Feasible { instance: PathBuf },
    /// Decide whether a balanced assignment exists and print a certificate.
    Decide {
        instance: PathBuf,
        /// Use the brute-force reference instead of the solver.
        #[arg(long)]
        oracle: bool,
    },
    /// Write a balanced periodic plan.
    Solve {
        instance: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a plan for feasibility and balance.
    Verify { instance: PathBuf, plan: PathBuf },
    /// Smallest worker count admitting a balanced assignment.
    MinWorkers { instance: PathBuf },
    /// Pebble systems on arc-colored digraphs.
    Pebbles {
        #[command(subcommand)]
        command: PebbleCommand,
    },
    /// Gantt chart of a plan, one row per worker.
    Render {
        instance: PathBuf,
        /// Defaults to the solved plan, or any feasible plan if none is balanced.
        plan: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Ascii)]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=2))]
        periods: u32,
    },
    /// Reference decision by exhaustive search (small instances only).
    Oracle { instance: PathBuf },
}

#[derive(Subcommand)]
enum PebbleCommand {
    Validate {
        graph: PathBuf,
    },
    /// Periodic color sequence from the identity placement and its visit counts.
    Walk {
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIFT_CAP)]
        cap: usize,
    },
    /// Uniformly random colors; empirical per-arc frequencies.
    Simulate {
        graph: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("values serialize"));
}

fn decision_code(yes: bool) -> u8 {
    if yes {
        YES
    } else {
        NO
    }
}

fn load_instance(path: &Path) -> Result<Instance> {
    let inst = Instance::load(path).with_context(|| format!("reading instance {}", path.display()))?;
    inst.ensure_valid()?;
    Ok(inst)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Validate { instance } => {
            let inst = Instance::load(&instance).with_context(|| format!("reading instance {}", instance.display()))?;
            let report = inst.validate();
            print_json(&json!({ "valid": report.is_valid(), "violations": report.violations }));
            Ok(if report.is_valid() { YES } else { INVALID })
        }
        Command::Feasible { instance } => {
            let inst = load_instance(&instance)?;
            let yes = feasible(&inst)?;
            print_json(&json!({
                "feasible": yes,
                "workers": inst.workers,
                "depth": inst.max_overlap_depth(),
            }));
            Ok(decision_code(yes))
        }
        Command::Decide { instance, oracle: true } | Command::Oracle { instance } => run_oracle(&instance),
        Command::Decide {
            instance,
            oracle: false,
        } => {
            let inst = load_instance(&instance)?;
            let decision = decide(&inst)?;
            print_json(&decision.certificate());
            Ok(decision_code(decision.is_balanced()))
        }
        Command::Solve { instance, output } => {
            let inst = load_instance(&instance)?;
            match solve(&inst)? {
                Some(plan) => {
                    write_output(output.as_deref(), &format!("{}\n", plan.to_json()))?;
                    Ok(YES)
                }
                None => {
                    eprintln!("no balanced assignment exists");
                    Ok(NO)
                }
            }
        }
        Command::Verify { instance, plan } => {
            let inst = load_instance(&instance)?;
            let plan = PeriodicAssignment::load(&plan).with_context(|| format!("reading plan {}", plan.display()))?;
            let conflict = is_feasible(&inst, &plan)?;
            let balanced = is_balanced(&inst, &plan);
            print_json(&json!({
                "feasible": conflict.is_none(),
                "conflict": conflict,
                "balanced": balanced,
                "profile": balance_profile(&inst, &plan),
            }));
            Ok(decision_code(conflict.is_none() && balanced))
        }
        Command::MinWorkers { instance } => {
            let inst = load_instance(&instance)?;
            let found = min_workers(&inst)?;
            print_json(&json!(found));
            Ok(YES)
        }
        Command::Pebbles { command } => run_pebbles(command),
        Command::Render {
            instance,
            plan,
            format,
            output,
            periods,
        } => {
            let inst = load_instance(&instance)?;
            let plan = match plan {
                Some(p) => PeriodicAssignment::load(&p).with_context(|| format!("reading plan {}", p.display()))?,
                None => match solve(&inst)? {
                    Some(plan) => plan,
                    None => feasible_plan(&inst)?.ok_or_else(|| RosterError::Infeasible("nothing to render".into()))?,
                },
            };
            if let Some(conflict) = is_feasible(&inst, &plan)? {
                eprintln!("warning: plan is not feasible: {}", serde_json::to_string(&conflict)?);
            }
            let text = match format {
                Format::Ascii => render_ascii(&inst, &plan, periods),
                Format::Svg => render_svg(&inst, &plan, periods),
            };
            write_output(output.as_deref(), &text)?;
            Ok(YES)
        }
    }
}

fn run_oracle(path: &Path) -> Result<u8> {
    let inst = load_instance(path)?;
    if inst.is_extended() {
        let limits = OracleLimits::periodic_default().with_env_overrides()?;
        let plan = oracle_balanced_plan(&inst, &limits)?;
        print_json(&json!({
            "decision": if plan.is_some() { "yes" } else { "no" },
            "source": "oracle",
            "period": plan.as_ref().map(PeriodicAssignment::period),
            "plan": plan.as_ref().map(PeriodicAssignment::rows),
        }));
        Ok(decision_code(plan.is_some()))
    } else {
        let limits = OracleLimits::default().with_env_overrides()?;
        let yes = oracle_decide_basic(&inst, &limits)?;
        print_json(&json!({
            "decision": if yes { "yes" } else { "no" },
            "source": "oracle",
        }));
        Ok(decision_code(yes))
    }
}

fn load_graph(path: &Path) -> Result<ColoredGraph> {
    ColoredGraph::load(path).with_context(|| format!("reading graph {}", path.display()))
}

fn run_pebbles(command: PebbleCommand) -> Result<u8> {
    match command {
        PebbleCommand::Validate { graph } => {
            let g = load_graph(&graph)?;
            let report = validate_colored_graph(&g);
            print_json(&json!({
                "valid": report.is_valid(),
                "errors": report.errors,
                "warnings": report.warnings,
            }));
            Ok(if report.is_valid() { YES } else { INVALID })
        }
        PebbleCommand::Walk { graph, cap } => {
            let g = load_graph(&graph)?;
            g.ensure_valid()?;
            let seed: Vec<usize> = (0..g.vertices).collect();
            let component = lift_component(&g, &seed, cap)?;
            let seq = periodic_color_sequence(&g, &seed, cap)?;
            let counts = visit_frequencies(&g, &seq, &seed, 1)?;
            let names: Vec<&str> = seq.colors.iter().map(|&c| g.colors[c].name.as_str()).collect();
            print_json(&json!({
                "period": seq.period(),
                "sequence": names,
                "placements": component.len(),
                "connected": g.is_connected(),
                "expected_visits": g.is_connected().then(|| expected_visits(&g, &component)),
                "uniform_visits": counts.uniform_value(),
            }));
            Ok(YES)
        }
        PebbleCommand::Simulate { graph, steps, seed } => {
            let g = load_graph(&graph)?;
            let report = simulate_random_colors(&g, steps, seed)?;
            print_json(&json!({
                "steps": report.steps,
                "seed": report.seed,
                "target": 1.0 / g.arc_count() as f64,
                "max_deviation": report.max_deviation,
                "frequencies": report.frequencies,
            }));
            Ok(YES)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            let kind = err
                .chain()
                .find_map(|e| e.downcast_ref::<RosterError>())
                .map_or("error", RosterError::kind);
            let report = json!({
                "error": kind,
                "message": format!("{err:#}"),
            });
            eprintln!("{report}");
            ExitCode::from(INVALID)
        }
    }
}
