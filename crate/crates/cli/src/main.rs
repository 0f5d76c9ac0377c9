use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use comb_forge::config::load_config;
use comb_forge::scenario::{run_config, run_scenario, ScenarioId, ScenarioOptions};
use serde_json::json;

const SCENARIO_HELP: &str = "Scenarios:
  fig2_inductance_pulses    fig3_inductance_spectrum  fig4_capacitance_pulses
  fig5_area_pulses          fig6_area_spectrum        fig7_asymmetry_pulses
  fig8_realistic_spectrum   n_scaling_sweep

Set COMB_FORGE_THREADS to cap the worker pool; results do not depend on it.";

#[derive(Parser)]
#[command(name = "comb-forge", version, about = "dc-SQUID radiation comb simulator", after_help = SCENARIO_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON config; outputs go to its `output_dir`.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Override a config key, e.g. `--set sigma_area=0.05`. Repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a named scenario.
    #[command(after_help = SCENARIO_HELP)]
    Scenario {
        id: String,
        #[arg(long)]
        out: PathBuf,
        /// 500 realizations instead of 10 000 for ensemble scenarios.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the scenario ids, one per line.
    ListScenarios,
}

fn fail(kind: &str, message: String, extra: serde_json::Value, code: u8) -> ExitCode {
    let mut record = json!({ "error": kind, "message": message });
    if let (Some(obj), serde_json::Value::Object(more)) = (record.as_object_mut(), extra) {
        obj.extend(more);
    }
    eprintln!("{record}");
    ExitCode::from(code)
}

fn core_error(e: comb_forge::Error) -> ExitCode {
    let extra = match &e {
        comb_forge::Error::UnknownScenario { .. } => json!({ "valid_ids": ScenarioId::ids() }),
        _ => json!({}),
    };
    fail(e.kind(), e.to_string(), extra, 1)
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("COMB_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("COMB_FORGE_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = configure_threads() {
        return fail("ValidationError", message, json!({}), 1);
    }
    let manifest = match cli.command {
        Command::ListScenarios => {
            for id in ScenarioId::ALL {
                println!("{:<26}{}", id.as_str(), id.description());
            }
            return ExitCode::SUCCESS;
        }
        Command::Simulate { config, overrides } => {
            load_config(&config, &overrides).and_then(|loaded| run_config(&loaded, &loaded.config.output_dir))
        }
        Command::Scenario { id, out, quick, seed } => id
            .parse::<ScenarioId>()
            .and_then(|id| run_scenario(id, &out, ScenarioOptions { quick, seed })),
    };
    match manifest {
        Ok(m) => {
            for w in &m.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&m).expect("manifest serializes")
            );
            ExitCode::SUCCESS
        }
        Err(e) => core_error(e),
    }
}
