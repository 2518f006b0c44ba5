use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use gkflow::algebra::verify::{
    check_sample, verify_algebra, FailingSample, SuiteSummary, VerifyReport,
};
use gkflow::algebra::PrincipalSpectrum;
use gkflow::flow::{self, write_checkpoint, FlowError, FlowState, FlowStatus};
use gkflow::geometry::io;
use gkflow::monitors::{all_passed, assert_estimates, Verdict};
use gkflow::surgery::{
    detect_necks, standard_surgery, surgically_modified_run, Classification, Fate, SurgeryError,
    SurgeryOutcome, SurgeryParams,
};

use crate::config::{ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("verdict failure: {0}")]
    Verdict(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Verdict(_) => 4,
        }
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("outputs serialize") + "\n";
    write(path, text)
}

fn output_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&cfg.output_dir).map_err(|source| CliError::Output {
        path: cfg.output_dir.clone(),
        source,
    })?;
    Ok(cfg.output_dir.clone())
}

fn checkpoint(path: &Path, s: &FlowState, ctl: &flow::StepControl) -> Result<(), CliError> {
    write_checkpoint(path, s, ctl).map_err(|e| match e {
        FlowError::Io(source) => CliError::Output {
            path: path.to_path_buf(),
            source,
        },
        e => CliError::Numerical(e.to_string()),
    })
}

/// Flow errors raised before any step are problems with the configuration.
fn flow_setup(e: FlowError) -> CliError {
    match e {
        FlowError::InadmissibleInitial(_) | FlowError::InvalidControl(_) => {
            CliError::Config(ConfigError::Invalid(e.to_string()))
        }
        e => CliError::Numerical(e.to_string()),
    }
}

#[derive(Serialize)]
struct FlowVerdict {
    mode: &'static str,
    status: FlowStatus,
    t_end: f64,
    steps: usize,
    extinction_time: Option<f64>,
    verdicts: Vec<Verdict>,
    passed: bool,
}

#[derive(Serialize)]
struct ComponentVerdict {
    id: usize,
    parent: Option<usize>,
    classification: Classification,
    fate: Fate,
    born: f64,
    ended: f64,
    monitor_rows: usize,
    verdicts: Vec<Verdict>,
    passed: bool,
}

#[derive(Serialize)]
struct SurgeryRunVerdict {
    mode: &'static str,
    g_stop: f64,
    surgery_count: usize,
    t_end: f64,
    /// Time the last component became extinct, when every surviving one did.
    extinction_time: Option<f64>,
    halted: bool,
    components: Vec<ComponentVerdict>,
    passed: bool,
}

/// `flow run`: monitor CSV, checkpoints and a verdict JSON in the output directory.
pub fn flow_run(config: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let curve = cfg.initial_profile()?;
    let dir = output_dir(&cfg)?;
    match cfg.surgery.clone() {
        None => plain_flow(&cfg, curve, &dir),
        Some(p) => flow_with_surgery(&cfg, &p, curve, &dir),
    }
}

fn plain_flow(
    cfg: &RunConfig,
    curve: gkflow::geometry::ProfileCurve,
    dir: &Path,
) -> Result<(), CliError> {
    let ctl = cfg.step_control();
    checkpoint(
        &dir.join("checkpoint_initial"),
        &FlowState::new(curve.clone()),
        &ctl,
    )?;
    let (state, report) = flow::run(curve, &ctl, cfg.t_max, &cfg.monitors).map_err(flow_setup)?;
    write(&dir.join("monitors.csv"), report.to_csv())?;
    checkpoint(&dir.join("checkpoint_final"), &state, &ctl)?;
    let verdicts = assert_estimates(&report, &cfg.tolerances);
    let passed = all_passed(&verdicts);
    let extinct = state.status == FlowStatus::Extinct;
    write_json(
        &dir.join("verdict.json"),
        &FlowVerdict {
            mode: "flow",
            status: state.status.clone(),
            t_end: state.t,
            steps: state.step_count,
            extinction_time: extinct.then_some(state.t),
            verdicts,
            passed,
        },
    )?;
    println!(
        "status {:?} at t = {} after {} steps",
        state.status, state.t, state.step_count
    );
    if let FlowStatus::Failed { reason } = &state.status {
        return Err(CliError::Numerical(reason.to_string()));
    }
    if !passed {
        return Err(CliError::Verdict("monitor estimates failed".into()));
    }
    Ok(())
}

fn flow_with_surgery(
    cfg: &RunConfig,
    p: &SurgeryParams,
    curve: gkflow::geometry::ProfileCurve,
    dir: &Path,
) -> Result<(), CliError> {
    let ctl = cfg.step_control();
    checkpoint(
        &dir.join("checkpoint_initial"),
        &FlowState::new(curve.clone()),
        &ctl,
    )?;
    let run =
        surgically_modified_run(curve, &ctl, p, cfg.t_max, &cfg.monitors).map_err(|e| match e {
            SurgeryError::Flow(e) => flow_setup(e),
            SurgeryError::InvalidParams(m) => CliError::Config(ConfigError::Invalid(m.into())),
            e => CliError::Numerical(e.to_string()),
        })?;
    write(&dir.join("history.jsonl"), run.history_jsonl())?;
    write_json(&dir.join("surgery_reports.json"), &run.surgeries)?;

    let mut components = Vec::new();
    for c in &run.components {
        write(
            &dir.join(format!("monitors_{}.csv", c.id)),
            c.monitors.to_csv(),
        )?;
        let status = if c.fate == Fate::Extinct {
            FlowStatus::Extinct
        } else {
            FlowStatus::Running
        };
        let state = FlowState::resume(c.last.clone(), c.ended, 0, status);
        checkpoint(
            &dir.join(format!("checkpoint_component_{}", c.id)),
            &state,
            &ctl,
        )?;
        let verdicts = assert_estimates(&c.monitors, &cfg.tolerances);
        components.push(ComponentVerdict {
            id: c.id,
            parent: c.parent,
            classification: c.classification,
            fate: c.fate,
            born: c.born,
            ended: c.ended,
            monitor_rows: c.monitors.rows.len(),
            passed: all_passed(&verdicts),
            verdicts,
        });
    }
    let halted = run.halted();
    let passed = !halted && components.iter().all(|c| c.passed);
    let t_end = run.components.iter().map(|c| c.ended).fold(0.0, f64::max);
    let all_extinct =
        run.survivors().all(|c| c.fate == Fate::Extinct) && run.survivors().count() > 0;
    write_json(
        &dir.join("verdict.json"),
        &SurgeryRunVerdict {
            mode: "surgery",
            g_stop: run.g_stop,
            surgery_count: run.surgery_count(),
            t_end,
            extinction_time: all_extinct.then_some(t_end),
            halted,
            components,
            passed,
        },
    )?;
    println!(
        "{} surgery event(s), {} component(s), t_end = {t_end}",
        run.surgery_count(),
        run.components.len()
    );
    if run.failed() {
        return Err(CliError::Numerical(
            "flow failed on a component; see history.jsonl".into(),
        ));
    }
    if halted {
        return Err(CliError::Verdict(
            "surgery halted; see history.jsonl".into(),
        ));
    }
    if !passed {
        return Err(CliError::Verdict("monitor estimates failed".into()));
    }
    Ok(())
}

/// `surgery demo`: flow the configured profile to the first threshold hit (or `t_max`),
/// then perform one standard surgery on its first neck.
pub fn surgery_demo(config: &Path) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let p = cfg
        .surgery
        .clone()
        .ok_or_else(|| ConfigError::Invalid("surgery demo needs a [surgery] table".into()))?;
    let curve = cfg.initial_profile()?;
    let dir = output_dir(&cfg)?;
    let mut ctl = cfg.step_control();
    ctl.g_stop.get_or_insert(2.0 * p.g_star);
    let (state, _) = flow::run(curve, &ctl, cfg.t_max, &cfg.monitors).map_err(flow_setup)?;
    match &state.status {
        FlowStatus::Running | FlowStatus::CurvatureThresholdHit { .. } => {}
        FlowStatus::Extinct => {
            return Err(CliError::Verdict(format!(
                "extinct at t = {} before any surgery",
                state.t
            )))
        }
        FlowStatus::Failed { reason } => return Err(CliError::Numerical(reason.to_string())),
    }
    let curve = state.curve;
    write(&dir.join("pre.csv"), io::to_csv(&curve))?;
    let necks =
        detect_necks(&curve, &p, cfg.kappa).map_err(|e| CliError::Numerical(e.to_string()))?;
    let Some(neck) = necks.first() else {
        return Err(CliError::Verdict(format!("no neck at t = {}", state.t)));
    };
    println!(
        "t = {}: neck r0 = {}, normalized length {}, z in [{}, {}]",
        state.t, neck.r0, neck.normalized_length, neck.z_start, neck.z_end
    );
    let save = |out: &SurgeryOutcome| -> Result<(), CliError> {
        for (k, c) in out.components.iter().enumerate() {
            write(&dir.join(format!("post_{k}.csv")), io::to_csv(c))?;
        }
        write_json(&dir.join("report.json"), &out.report)
    };
    match standard_surgery(&curve, neck, &p, cfg.kappa) {
        Ok(out) => {
            save(&out)?;
            println!("{} component(s), all verdicts passed", out.components.len());
            Ok(())
        }
        Err(SurgeryError::MonotonicityViolated(msg, out)) => {
            save(&out)?;
            Err(CliError::Verdict(msg))
        }
        Err(SurgeryError::InvalidParams(m)) => Err(ConfigError::Invalid(m.into()).into()),
        Err(e @ SurgeryError::NeckTooShort { .. }) => Err(CliError::Verdict(e.to_string())),
        Err(e) => Err(CliError::Numerical(e.to_string())),
    }
}

/// `verify algebra`: random suites, or a replay of one serialized failing sample.
/// The report goes to stdout and, when given, to `out`.
pub fn verify(
    samples: usize,
    seed: u64,
    replay: Option<&Path>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if samples == 0 && replay.is_none() {
        return Err(ConfigError::Invalid("samples must be at least 1".into()).into());
    }
    let report = match replay {
        None => verify_algebra(samples, seed),
        Some(path) => replay_sample(path)?,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    print!("{text}");
    if let Some(path) = out {
        write(path, &text)?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Verdict(format!(
            "{} property failure(s)",
            report.failures.len()
        )))
    }
}

fn replay_sample(path: &Path) -> Result<VerifyReport, CliError> {
    let bad = |m: String| CliError::Config(ConfigError::Invalid(m));
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let sample: FailingSample =
        serde_json::from_str(&text).map_err(|e| bad(format!("replay sample: {e}")))?;
    let s = PrincipalSpectrum::new(sample.kappa, sample.lambdas.clone())
        .map_err(|e| bad(format!("replay sample: {e}")))?;
    let mut suites: Vec<SuiteSummary> = Vec::new();
    let mut failures = Vec::new();
    for (suite, condition, passed, worst) in check_sample(&s, sample.sample_seed) {
        match suites.iter_mut().find(|x| x.suite == suite) {
            Some(x) => x.checks += 1,
            None => suites.push(SuiteSummary {
                suite: suite.into(),
                checks: 1,
                failures: 0,
            }),
        }
        if !passed {
            suites
                .iter_mut()
                .find(|x| x.suite == suite)
                .expect("pushed")
                .failures += 1;
            failures.push(FailingSample {
                suite: suite.into(),
                condition,
                worst,
                ..sample.clone()
            });
        }
    }
    Ok(VerifyReport {
        samples: 1,
        seed: sample.sample_seed,
        suites,
        failures,
    })
}

pub fn print_defaults() {
    print!("{}", RunConfig::default().to_toml());
}
