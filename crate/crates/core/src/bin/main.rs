use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use dialogue_noise_lab::error_model::ErrorConfig;
use dialogue_noise_lab::lab::{
    evaluate_rule_baseline, final_success, preset_names, run_suite, AgentKind, ExperimentSetting, Lab, LabConfig,
    PRESETS,
};

#[derive(Parser)]
#[command(name = "dialogue-noise-lab", version, about = "Noisy-channel dialogue policy experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train/evaluate one setting (a preset name, `all`, or `custom`) over several seeds.
    Run {
        #[arg(long)]
        setting: String,
        #[arg(long)]
        intent_type: Option<u8>,
        #[arg(long)]
        intent_rate: Option<f64>,
        #[arg(long)]
        slot_type: Option<u8>,
        #[arg(long)]
        slot_rate: Option<f64>,
        #[arg(long, default_value = "dqn")]
        agent: AgentKind,
        #[arg(long, default_value_t = 10)]
        runs: usize,
        #[arg(long, default_value_t = 300)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed_offset: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write the last epoch's evaluation dialogues as TSV.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// List the preset error settings.
    Presets,
    /// Rule-agent success rate on B1, B2, B3.
    Baseline {
        #[arg(long, default_value_t = 2000)]
        episodes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_lab(config: Option<&PathBuf>) -> Result<Lab> {
    let cfg = match config {
        Some(p) => LabConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => LabConfig::default(),
    };
    Ok(Lab::new(cfg)?)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Presets => {
            println!("name\tintent_type\tintent_rate\tslot_type\tslot_rate");
            for (name, it, ir, st, sr) in PRESETS {
                println!("{name}\t{it}\t{ir:.2}\t{st}\t{sr:.2}");
            }
        }
        Command::Baseline { episodes, seed, config } => {
            let lab = load_lab(config.as_ref())?;
            let settings: Vec<_> =
                ["B1", "B2", "B3"].iter().map(|n| ExperimentSetting::preset(n, AgentKind::Rule)).collect::<Result<_, _>>()?;
            for (name, rate) in evaluate_rule_baseline(&lab, &settings, episodes, seed) {
                println!("{name}\t{rate:.4}");
            }
        }
        Command::Run {
            setting,
            intent_type,
            intent_rate,
            slot_type,
            slot_rate,
            agent,
            runs,
            epochs,
            seed_offset,
            out,
            trace,
            config,
        } => {
            let lab = load_lab(config.as_ref())?;
            let custom = [intent_type.is_some(), intent_rate.is_some(), slot_type.is_some(), slot_rate.is_some()];
            let settings = if setting.eq_ignore_ascii_case("custom") {
                let error = ErrorConfig::new(
                    intent_type.unwrap_or(0),
                    intent_rate.unwrap_or(0.0),
                    slot_type.unwrap_or(0),
                    slot_rate.unwrap_or(0.0),
                )?;
                vec![ExperimentSetting::custom("custom", error, agent)]
            } else if custom.iter().any(|&c| c) {
                bail!("--intent-*/--slot-* flags require --setting custom");
            } else if setting.eq_ignore_ascii_case("all") {
                preset_names().map(|n| ExperimentSetting::preset(n, agent)).collect::<Result<_, _>>()?
            } else {
                vec![ExperimentSetting::preset(&setting, agent)?]
            };
            let result = run_suite(&lab, &settings, runs, epochs, seed_offset, Some(&out), trace)?;
            for s in &settings {
                let mean = result.mean_curve(&s.name);
                let last = mean.last().expect("at least one epoch");
                let fin = final_success(mean.iter().map(|m| m.success_rate));
                println!(
                    "{}\tfinal_success={fin:.3}\tlast_epoch success={:.3} reward={:.2} turns={:.2}",
                    s.name, last.success_rate, last.avg_reward, last.avg_turns
                );
            }
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}
