//! Command implementations behind the `pu` binary.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{self, VERSION};
use crate::dynamics::{
    integrate, mode_decompose, mode_energy, threshold_scan, write_csv, IntegratorSettings, ScanOptions, ScanOutcome,
};
use crate::embedding::{
    positivity, pullback_hamiltonian, pushforward_poisson, reconcile_family, Branch, Family, FreeParams,
};
use crate::error::Error;
use crate::model::{
    h1, h2, interacting_vector_field, ostro_to_jet, Chart, JetState, OstroState, Potential, PuParams,
    QuadraticObservable,
};
use crate::verify::{run_suite, VerifyConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVARIANT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_SCAN_DEGENERATE: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "pu",
    version,
    about = "Pais-Uhlenbeck oscillator: structure checks, embeddings and dynamics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant suite and emit a pass/fail report.
    Verify,
    /// Integrate one trajectory and write it as CSV or JSON.
    Simulate,
    /// Build, verify and compare a two-dimensional embedding.
    Embed(EmbedArgs),
    /// Locate the coupling threshold for runaway motion.
    Scan(ScanArgs),
    /// Decompose the initial state into normal modes.
    Modes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartArg {
    Jet,
    Ostro,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RunArgs {
    #[arg(long, global = true, default_value_t = 1.0)]
    pub omega1: f64,
    #[arg(long, global = true, default_value_t = 2.0)]
    pub omega2: f64,
    #[arg(long, global = true, default_value_t = 0.0)]
    pub lambda: f64,
    #[arg(long, global = true, value_enum, default_value_t = ChartArg::Ostro)]
    pub chart: ChartArg,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub qd0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub qdd0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub qddd0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub x2: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p2: Option<f64>,
    #[arg(long, global = true, default_value_t = config::DEFAULT_T_END)]
    pub t_end: f64,
    #[arg(long, global = true, default_value_t = config::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = config::DEFAULT_SAMPLE_RATE)]
    pub sample_rate: f64,
    #[arg(long, global = true)]
    pub escape_radius: Option<f64>,
    #[arg(long, global = true, default_value_t = config::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format of `simulate` (default csv); reports are always JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum FamilyArg {
    Ta1,
    Ta2,
    Tb1,
    Tb2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum BranchArg {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EmbedArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long, value_enum, default_value_t = BranchArg::Plus)]
    pub branch: BranchArg,
    #[arg(long, allow_hyphen_values = true)]
    pub a_x: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub a_y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b_y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = config::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    #[arg(long, default_value_t = config::DEFAULT_BISECTION_ITERS)]
    pub bisection_iters: usize,
}

/// Outcome of a command: exit code, primary output, and an optional note for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub code: u8,
    pub output: Vec<u8>,
    pub note: Option<String>,
}

impl Outcome {
    fn json(code: u8, value: &impl Serialize) -> Self {
        let mut output = serde_json::to_vec_pretty(value).expect("serializable report");
        output.push(b'\n');
        Self {
            code,
            output,
            note: None,
        }
    }

    fn failure(code: u8, err: impl std::fmt::Display) -> Self {
        Self {
            code,
            output: Vec::new(),
            note: Some(format!("error: {err}")),
        }
    }
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_)
        | Error::PreconditionViolated(_)
        | Error::DegenerateFrequencies { .. }
        | Error::ComplexBranch { .. }
        | Error::NoSolution(_)
        | Error::NonUnique { .. }
        | Error::DegenerateModel(_)
        | Error::SingularCoefficient { .. } => EXIT_USAGE,
        Error::AllBounded { .. } | Error::AllUnbounded { .. } => EXIT_SCAN_DEGENERATE,
        _ => EXIT_NUMERICAL,
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunArgs,
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<serde_json::Value>,
    result: T,
}

impl RunArgs {
    pub fn params(&self) -> Result<PuParams, Error> {
        PuParams::new(self.omega1, self.omega2)
    }

    /// Jet-chart initial state; flags default to the Figure-1 data
    /// `x1 = x2 = 0, p1 = -p2 = 0.5`, i.e. `(0, 0, -0.5, -0.5)` on the jet chart.
    pub fn initial_state(&self, params: &PuParams) -> Result<JetState, Error> {
        let jet = [self.q0, self.qd0, self.qdd0, self.qddd0];
        let ostro = [self.x1, self.x2, self.p1, self.p2];
        let fig = config::FIGURE_INITIAL_OSTRO;
        match self.chart {
            ChartArg::Jet => {
                if ostro.iter().any(Option::is_some) {
                    return Err(Error::InvalidArgument("--x1/--x2/--p1/--p2 need --chart ostro".into()));
                }
                let d = ostro_to_jet(params, &OstroState::new(fig[0], fig[1], fig[2], fig[3]));
                Ok(JetState::new(
                    self.q0.unwrap_or(d.q),
                    self.qd0.unwrap_or(d.qd),
                    self.qdd0.unwrap_or(d.qdd),
                    self.qddd0.unwrap_or(d.qddd),
                ))
            }
            ChartArg::Ostro => {
                if jet.iter().any(Option::is_some) {
                    return Err(Error::InvalidArgument(
                        "--q0/--qd0/--qdd0/--qddd0 need --chart jet".into(),
                    ));
                }
                let s = OstroState::new(
                    self.x1.unwrap_or(fig[0]),
                    self.x2.unwrap_or(fig[1]),
                    self.p1.unwrap_or(fig[2]),
                    self.p2.unwrap_or(fig[3]),
                );
                Ok(ostro_to_jet(params, &s))
            }
        }
    }

    pub fn settings(&self) -> IntegratorSettings {
        IntegratorSettings {
            t_end: self.t_end,
            tol: self.tol,
            sample_rate: self.sample_rate,
            escape_radius: self.escape_radius,
            ..Default::default()
        }
    }

    fn envelope<T: Serialize>(&self, command: Option<&impl Serialize>, body: T) -> Envelope<'_, T> {
        let command = command.map(|c| serde_json::to_value(c).expect("serializable arguments"));
        Envelope {
            version: VERSION,
            config: self,
            command,
            result: body,
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    let run = &cli.run;
    if run.format == Some(Format::Csv) && !matches!(cli.command, Command::Simulate) {
        return Outcome::failure(EXIT_USAGE, "--format csv applies to simulate only");
    }
    let result = match &cli.command {
        Command::Verify => Ok(cmd_verify(run)),
        Command::Simulate => cmd_simulate(run),
        Command::Embed(args) => cmd_embed(run, args),
        Command::Scan(args) => cmd_scan(run, args),
        Command::Modes => cmd_modes(run),
    };
    result.unwrap_or_else(|e| Outcome::failure(exit_code(&e), e))
}

pub fn cmd_verify(run: &RunArgs) -> Outcome {
    let report = run_suite(VerifyConfig {
        omega1: run.omega1,
        omega2: run.omega2,
        lambda: run.lambda,
        seed: run.seed,
    });
    let code = if report.all_passed { EXIT_OK } else { EXIT_INVARIANT };
    let mut out = Outcome::json(code, &run.envelope(None::<&()>, &report));
    if let Some(name) = report.first_failure {
        out.note = Some(format!("invariant failed: {name}"));
    }
    out
}

#[derive(Serialize)]
struct SimulationSummary {
    bounded: bool,
    escape_time: Option<f64>,
    max_norm: f64,
    escape_radius: f64,
    samples: usize,
    h1_drift: f64,
    h2_drift: f64,
    hint_drift: f64,
    accepted_steps: usize,
    rejected_steps: usize,
}

pub fn cmd_simulate(run: &RunArgs) -> Result<Outcome, Error> {
    let p = run.params()?;
    let z0 = run.initial_state(&p)?;
    let field = interacting_vector_field(&p, Potential::quartic(run.lambda));
    let traj = integrate(&p, &field, z0, &run.settings())?;
    let m = &traj.meta;
    let summary = SimulationSummary {
        bounded: traj.bounded(),
        escape_time: m.escape_time,
        max_norm: m.max_norm,
        escape_radius: m.escape_radius,
        samples: traj.len(),
        h1_drift: m.h1_drift,
        h2_drift: m.h2_drift,
        hint_drift: m.hint_drift,
        accepted_steps: m.accepted_steps,
        rejected_steps: m.rejected_steps,
    };
    let mut data = Vec::new();
    match run.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&traj, run, &mut data)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut data, &run.envelope(None::<&()>, &traj))?;
            data.push(b'\n');
        }
    }
    let summary = serde_json::to_string_pretty(&run.envelope(None::<&()>, &summary))?;
    Ok(Outcome {
        code: EXIT_OK,
        output: data,
        note: Some(summary),
    })
}

#[derive(Serialize)]
struct EmbedReport {
    reconciliation: crate::embedding::Reconciliation,
    singular_pushforward: bool,
    pushforward: Option<crate::embedding::Pushforward>,
    pushforward_error: Option<String>,
    pullback: Option<crate::embedding::Pullback>,
    pullback_error: Option<String>,
    positivity_h_fo: Option<crate::embedding::PositivityVerdict>,
    positivity_pullback: Option<crate::embedding::PositivityVerdict>,
}

pub fn cmd_embed(run: &RunArgs, args: &EmbedArgs) -> Result<Outcome, Error> {
    let p = run.params()?;
    let family = match args.family {
        FamilyArg::Ta1 => Family::Ta1,
        FamilyArg::Ta2 => Family::Ta2,
        FamilyArg::Tb1 => Family::Tb1,
        FamilyArg::Tb2 => Family::Tb2,
    };
    let branch = match args.branch {
        BranchArg::Plus => Branch::Plus,
        BranchArg::Minus => Branch::Minus,
    };
    let (need, present) = match family {
        Family::Ta1 | Family::Ta2 => ("--a-y", args.a_y.is_some()),
        Family::Tb1 => ("--b-x", args.b_x.is_some()),
        Family::Tb2 => ("--b-y", args.b_y.is_some()),
    };
    if !present {
        return Err(Error::InvalidArgument(format!("{family:?} needs {need}")));
    }
    let free = FreeParams {
        a_x: args.a_x,
        a_y: args.a_y,
        b_x: args.b_x,
        b_y: args.b_y,
        g: args.g,
    };
    let reconciliation = reconcile_family(family, branch, free, &p);
    let Some(map) = reconciliation.solved else {
        return Err(crate::embedding::solve_family(family, branch, free, &p).expect_err("solve failed above"));
    };
    let (pushforward, pushforward_error) = split(pushforward_poisson(&map));
    let (pullback, pullback_error) = split(pullback_hamiltonian(&map));
    let positivity_h_fo = map
        .model
        .hamiltonian_hessian()
        .map(|h| positivity(&QuadraticObservable::new(h, Chart::Jet)));
    let positivity_pullback = pullback.as_ref().and_then(|pb| pb.observable.as_ref()).map(positivity);
    let report = EmbedReport {
        reconciliation,
        singular_pushforward: pushforward.is_none(),
        pushforward,
        pushforward_error,
        pullback,
        pullback_error,
        positivity_h_fo,
        positivity_pullback,
    };
    let code = if report.pullback_error.is_some() && map.is_invertible() {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    };
    Ok(Outcome::json(code, &run.envelope(Some(args), &report)))
}

fn split<T>(r: Result<T, Error>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

pub fn cmd_scan(run: &RunArgs, args: &ScanArgs) -> Result<Outcome, Error> {
    if args.lambda_min != 0.0 || args.lambda_max.partial_cmp(&args.lambda_min).is_none_or(|o| o.is_lt()) {
        return Err(Error::InvalidArgument(format!(
            "lambda range must be [0, lambda_max] with lambda_max >= 0, got [{}, {}]",
            args.lambda_min, args.lambda_max
        )));
    }
    let p = run.params()?;
    let z0 = run.initial_state(&p)?;
    let options = ScanOptions {
        grid_points: args.grid_points,
        bisection_iters: args.bisection_iters,
    };
    let report = threshold_scan(&p, z0, &run.settings(), args.lambda_max, options)?;
    let code = match report.outcome {
        ScanOutcome::Threshold => EXIT_OK,
        _ => EXIT_SCAN_DEGENERATE,
    };
    let mut out = Outcome::json(code, &run.envelope(Some(args), &report));
    if code != EXIT_OK {
        out.note = Some(format!("scan outcome: {:?}", report.outcome));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ModesReport {
    initial_state: JetState,
    amplitudes: crate::dynamics::ModeAmplitudes,
    energy: crate::dynamics::ModeEnergy,
    h1: f64,
    h2: f64,
}

pub fn cmd_modes(run: &RunArgs) -> Result<Outcome, Error> {
    let p = run.params()?;
    let z = run.initial_state(&p)?;
    let amplitudes = mode_decompose(&p, &z);
    let report = ModesReport {
        initial_state: z,
        amplitudes,
        energy: mode_energy(&p, &amplitudes),
        h1: h1(&p).eval_jet(&z),
        h2: h2(&p).eval_jet(&z),
    };
    Ok(Outcome::json(EXIT_OK, &run.envelope(None::<&()>, &report)))
}

/// Writes the primary output to `--out` (or stdout) and the note to stderr.
pub fn emit(run: &RunArgs, outcome: &Outcome) -> io::Result<()> {
    if !outcome.output.is_empty() {
        match &run.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                w.write_all(&outcome.output)?;
                w.flush()?;
            }
            None => io::stdout().write_all(&outcome.output)?,
        }
    }
    if let Some(note) = &outcome.note {
        if run.out.is_some() && outcome.code == EXIT_OK {
            println!("{note}");
        } else {
            eprintln!("{note}");
        }
    }
    Ok(())
}
