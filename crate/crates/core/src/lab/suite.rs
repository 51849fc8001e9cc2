use std::fs;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_episode, run_training, Controller, EpisodeRngs, ExperimentSetting, Lab, LabError, LearningCurve, RunResult};

/// One line of a per-run or merged curve file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub setting: String,
    pub run: String,
    pub epoch: usize,
    pub success_rate: f64,
    pub avg_reward: f64,
    pub avg_turns: f64,
}

/// One line of the mean file: `run` is always `mean`; sample standard deviations over runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub setting: String,
    pub run: String,
    pub epoch: usize,
    pub success_rate: f64,
    pub avg_reward: f64,
    pub avg_turns: f64,
    pub success_sd: f64,
    pub reward_sd: f64,
    pub turns_sd: f64,
}

#[derive(Clone, Debug)]
pub struct SuiteRun {
    pub setting: String,
    pub seed: u64,
    pub result: Arc<RunResult>,
}

#[derive(Clone, Debug)]
pub struct SuiteOutput {
    /// Settings in request order, seeds ascending within each.
    pub runs: Vec<SuiteRun>,
    pub means: Vec<MeanRow>,
}

impl SuiteOutput {
    pub fn curves(&self, setting: &str) -> Vec<&LearningCurve> {
        self.runs.iter().filter(|r| r.setting == setting).map(|r| &r.result.curve).collect()
    }

    pub fn mean_curve(&self, setting: &str) -> Vec<&MeanRow> {
        self.means.iter().filter(|m| m.setting == setting).collect()
    }
}

pub fn curve_rows(curve: &LearningCurve) -> Vec<CurveRow> {
    curve
        .epochs
        .iter()
        .map(|e| CurveRow {
            setting: curve.setting.clone(),
            run: curve.seed.to_string(),
            epoch: e.epoch,
            success_rate: e.success_rate,
            avg_reward: e.avg_reward,
            avg_turns: e.avg_turns,
        })
        .collect()
}

pub fn write_curve_csv<W: Write, T: Serialize>(rows: &[T], out: W) -> Result<(), LabError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| LabError::Io(e.to_string()))?;
    Ok(())
}

pub fn read_curve_csv<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>, LabError> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(LabError::from)).collect()
}

/// Per-epoch mean and sample standard deviation over the runs of each setting.
/// Curves of one setting must have equal length.
pub fn mean_curves(curves: &[&LearningCurve]) -> Vec<MeanRow> {
    let mut names: Vec<&str> = Vec::new();
    for c in curves {
        if !names.contains(&c.setting.as_str()) {
            names.push(&c.setting);
        }
    }
    let mut out = Vec::new();
    for name in names {
        let group: Vec<&LearningCurve> = curves.iter().copied().filter(|c| c.setting == name).collect();
        let n_epochs = group[0].epochs.len();
        assert!(group.iter().all(|c| c.epochs.len() == n_epochs), "ragged curves for {name}");
        for i in 0..n_epochs {
            let stat = |f: fn(&super::EpochMetrics) -> f64| mean_sd(group.iter().map(|c| f(&c.epochs[i])));
            let (success_rate, success_sd) = stat(|e| e.success_rate);
            let (avg_reward, reward_sd) = stat(|e| e.avg_reward);
            let (avg_turns, turns_sd) = stat(|e| e.avg_turns);
            out.push(MeanRow {
                setting: name.to_string(),
                run: "mean".into(),
                epoch: group[0].epochs[i].epoch,
                success_rate,
                avg_reward,
                avg_turns,
                success_sd,
                reward_sd,
                turns_sd,
            });
        }
    }
    out
}

fn mean_sd(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Serialize)]
struct Metadata<'a> {
    version: &'a str,
    config: &'a super::LabConfig,
    actions: Vec<String>,
    settings: &'a [ExperimentSetting],
    seeds: Vec<u64>,
    epochs: usize,
}

/// Runs every setting with seeds `seed_offset+1 ..= seed_offset+n_runs`.
///
/// Settings with identical error model and agent are computed once and reported under
/// each name. Units run in parallel; each one's output is a separate file, merged into
/// `runs.csv` and `mean.csv` afterwards. With `out_dir` set, the directory must be
/// writable up front (checked by writing `metadata.json` before any run starts).
pub fn run_suite(
    lab: &Lab,
    settings: &[ExperimentSetting],
    n_runs: usize,
    n_epochs: usize,
    seed_offset: u64,
    out_dir: Option<&Path>,
    trace: bool,
) -> Result<SuiteOutput, LabError> {
    if n_runs == 0 || n_epochs == 0 {
        return Err(LabError::Config { line: 0, msg: "runs and epochs must be at least 1".into() });
    }
    let seeds: Vec<u64> = (1..=n_runs as u64).map(|k| k + seed_offset).collect();
    if let Some(dir) = out_dir {
        let io = |e: std::io::Error| LabError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir.join("runs")).map_err(io)?;
        let meta = Metadata {
            version: env!("CARGO_PKG_VERSION"),
            config: &lab.config,
            actions: lab.actions.names(),
            settings,
            seeds: seeds.clone(),
            epochs: n_epochs,
        };
        let json = serde_json::to_string_pretty(&meta).map_err(|e| LabError::Io(e.to_string()))?;
        fs::write(dir.join("metadata.json"), json).map_err(io)?;
        if trace {
            fs::create_dir_all(dir.join("traces")).map_err(io)?;
        }
    }

    let mut distinct: Vec<&ExperimentSetting> = Vec::new();
    let unit_of: Vec<usize> = settings
        .iter()
        .map(|s| match distinct.iter().position(|d| d.error == s.error && d.agent == s.agent) {
            Some(i) => i,
            None => {
                distinct.push(s);
                distinct.len() - 1
            }
        })
        .collect();
    let units: Vec<(usize, u64)> =
        (0..distinct.len()).flat_map(|i| seeds.iter().map(move |&s| (i, s))).collect();
    let results: Vec<Arc<RunResult>> = units
        .par_iter()
        .map(|&(i, seed)| Arc::new(run_training(lab, distinct[i], seed, n_epochs, trace)))
        .collect();

    let mut runs = Vec::with_capacity(settings.len() * seeds.len());
    for (setting, &u) in settings.iter().zip(&unit_of) {
        for (k, &seed) in seeds.iter().enumerate() {
            let shared = &results[u * seeds.len() + k];
            let result = if shared.curve.setting == setting.name {
                Arc::clone(shared)
            } else {
                let mut r = (**shared).clone();
                r.curve.setting = setting.name.clone();
                Arc::new(r)
            };
            runs.push(SuiteRun { setting: setting.name.clone(), seed, result });
        }
    }
    let curves: Vec<&LearningCurve> = runs.iter().map(|r| &r.result.curve).collect();
    let means = mean_curves(&curves);

    if let Some(dir) = out_dir {
        let create = |p: &Path| fs::File::create(p).map_err(|e| LabError::Io(format!("{}: {e}", p.display())));
        let mut merged = Vec::new();
        for run in &runs {
            let rows = curve_rows(&run.result.curve);
            let path = dir.join("runs").join(format!("{}_seed{}.csv", run.setting, run.seed));
            write_curve_csv(&rows, create(&path)?)?;
            merged.extend(rows);
            if trace {
                let path = dir.join("traces").join(format!("{}_seed{}.tsv", run.setting, run.seed));
                let mut f = create(&path)?;
                writeln!(f, "turn\tspeaker\tintent\tinform_slots\trequest_slots\tcorrupted")
                    .and_then(|_| run.result.trace.iter().try_for_each(|l| writeln!(f, "{l}")))
                    .map_err(|e| LabError::Io(e.to_string()))?;
            }
        }
        write_curve_csv(&merged, create(&dir.join("runs.csv"))?)?;
        write_curve_csv(&means, create(&dir.join("mean.csv"))?)?;
    }
    Ok(SuiteOutput { runs, means })
}

/// Success rate of the rule agent over `n_episodes` per setting, noise on. All settings
/// are evaluated on the same goal sequence.
pub fn evaluate_rule_baseline(lab: &Lab, settings: &[ExperimentSetting], n_episodes: usize, seed: u64) -> Vec<(String, f64)> {
    settings
        .iter()
        .map(|s| {
            let mut rngs = EpisodeRngs::new(seed, 0);
            let wins = (0..n_episodes)
                .filter(|_| run_episode(lab, Controller::Rule, &s.error, &mut rngs, false, None).outcome.success)
                .count();
            (s.name.clone(), wins as f64 / n_episodes.max(1) as f64)
        })
        .collect()
}
