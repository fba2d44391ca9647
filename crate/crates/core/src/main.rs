use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use renyi_coherence::audit::{
    audit, check_b3, check_c1, check_c2a, check_c2b, check_c3, check_extended_c2b, AuditConfig,
    AuditSummary, ChannelFamily, Condition, ConditionVerdict,
};
use renyi_coherence::channel::KrausChannel;
use renyi_coherence::io::{parse_channel, parse_density, parse_ensemble, ParseError};
use renyi_coherence::linalg::DEFAULT_TOLERANCE;
use renyi_coherence::measures::{relative_entropy_coherence, renyi_coherence, tsallis_coherence};
use renyi_coherence::qubit::{qubit_c2, QubitParams};
use renyi_coherence::scenarios::{
    default_alpha_grid, default_population_grid, default_subunit_grid, reproduce_extended_c2b,
    reproduce_fig1, reproduce_fig2, reproduce_fig3,
};
use renyi_coherence::table::{parse_grid, SweepTable};
use renyi_coherence::{DensityMatrix, Error};

/// Rényi α-relative entropy of coherence: quantifiers, axiom checks, figure sweeps and audits.
#[derive(Parser, Debug)]
#[command(name = "coherence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a coherence quantifier on a state.
    Compute {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Measure::Renyi)]
        measure: Measure,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check one monotonicity condition; exits 1 when it is violated.
    Check {
        #[arg(long, value_enum)]
        condition: ConditionArg,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        channel: Option<PathBuf>,
        /// JSON list of {"weight", "state"} entries (c3).
        #[arg(long)]
        ensemble: Option<PathBuf>,
        /// Second block (b3).
        #[arg(long)]
        state2: Option<PathBuf>,
        /// Weight of the first block (b3).
        #[arg(long)]
        p1: Option<f64>,
        #[arg(long, conflicts_with = "alpha_grid")]
        alpha: Option<f64>,
        /// `start:stop:step`, comma-separated ranges allowed.
        #[arg(long)]
        alpha_grid: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a figure or worked-example sweep.
    Reproduce {
        #[arg(value_enum)]
        scenario: Scenario,
        /// α grid (or population grid for fig3); defaults to the scenario's own grid.
        #[arg(long, visible_alias = "alpha-grid")]
        grid: Option<String>,
        /// Amplitude |b| of the Kraus pair (extc2b).
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run every checker on seeded random states and channels.
    Audit {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        alpha_grid: Option<String>,
        #[arg(long, value_enum, default_value_t = Family::Random)]
        family: Family,
        /// Keep only verdicts for this condition.
        #[arg(long, value_enum)]
        condition: Option<ConditionArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Measure {
    Renyi,
    Tsallis,
    Relent,
    #[value(name = "c2_qubit")]
    C2Qubit,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum ConditionArg {
    C1,
    C2a,
    C2b,
    Extc2b,
    C3,
    B3,
}

impl ConditionArg {
    fn condition(self) -> Condition {
        match self {
            ConditionArg::C1 => Condition::C1,
            ConditionArg::C2a => Condition::C2a,
            ConditionArg::C2b => Condition::C2b,
            ConditionArg::Extc2b => Condition::ExtC2b,
            ConditionArg::C3 => Condition::C3,
            ConditionArg::B3 => Condition::B3,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Scenario {
    Fig1,
    Fig2,
    Fig3,
    Extc2b,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Random,
    KrausPair,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        let model = match self {
            CliError::Model(e) => Some(e),
            CliError::Parse {
                source: ParseError::Invalid(e),
                ..
            } => Some(e),
            _ => None,
        };
        match model {
            Some(Error::AlphaOutOfRange(_)) => 3,
            Some(Error::NotIncoherent) => 4,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Output text and whether any verdict in it was a violation.
struct Output {
    text: String,
    violated: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("COHERENCE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(violated) => ExitCode::from(u8::from(violated)),
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Model(Error::AlphaOutOfRange(a)) = &e {
                if *a == 1.0 {
                    eprintln!("hint: the α → 1 limit is the relative entropy of coherence; use --measure relent");
                }
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> CliResult<bool> {
    let (out_path, output) = match cli.command {
        Command::Compute {
            state,
            measure,
            alpha,
            out,
        } => (out, compute(&state, measure, alpha)?),
        Command::Check {
            condition,
            state,
            channel,
            ensemble,
            state2,
            p1,
            alpha,
            alpha_grid,
            out,
        } => {
            let inputs = CheckInputs {
                state,
                channel,
                ensemble,
                state2,
                p1,
            };
            let alphas = alphas_from(alpha, alpha_grid.as_deref())?;
            (out, check(condition, &inputs, &alphas)?)
        }
        Command::Reproduce {
            scenario,
            grid,
            b,
            format,
            out,
        } => (out, reproduce(scenario, grid.as_deref(), b, format)?),
        Command::Audit {
            d,
            trials,
            seed,
            alpha_grid,
            family,
            condition,
            out,
        } => {
            let alphas = match alpha_grid {
                Some(g) => parse_grid(&g)?,
                None => default_audit_alphas(),
            };
            let family = match family {
                Family::Random => ChannelFamily::RandomIncoherent,
                Family::KrausPair => ChannelFamily::KrausPair,
            };
            let cfg = AuditConfig {
                dim: d,
                trials,
                alphas,
                seed,
                family,
            };
            (
                out,
                run_audit(&cfg, condition.map(ConditionArg::condition))?,
            )
        }
    };
    emit(out_path.as_deref(), &output.text)?;
    Ok(output.violated)
}

fn default_audit_alphas() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.2, 1.5, 2.0]
}

fn alphas_from(alpha: Option<f64>, grid: Option<&str>) -> CliResult<Vec<f64>> {
    match (alpha, grid) {
        (Some(a), _) => Ok(vec![a]),
        (None, Some(g)) => Ok(parse_grid(g)?),
        (None, None) => Err(CliError::Usage(
            "one of --alpha or --alpha-grid is required".into(),
        )),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_state(path: &Path) -> CliResult<DensityMatrix> {
    parse_density(&read(path)?, DEFAULT_TOLERANCE).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn load_channel(path: &Path) -> CliResult<KrausChannel> {
    parse_channel(&read(path)?, DEFAULT_TOLERANCE).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> CliResult<&'a Path> {
    path.as_deref()
        .ok_or_else(|| CliError::Usage(format!("--{flag} is required for this condition")))
}

fn compute(path: &Path, measure: Measure, alpha: Option<f64>) -> CliResult<Output> {
    let rho = load_state(path)?;
    let need_alpha =
        || alpha.ok_or_else(|| CliError::Usage("--alpha is required for this measure".into()));
    let value = match measure {
        Measure::Renyi => renyi_coherence(&rho, need_alpha()?)?.to_json(),
        Measure::Tsallis => tsallis_coherence(&rho, need_alpha()?)?.to_json(),
        Measure::Relent => relative_entropy_coherence(&rho).to_json(),
        Measure::C2Qubit => {
            if rho.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: rho.dim(),
                }
                .into());
            }
            let m = rho.matrix();
            let params = QubitParams::new(m[(0, 0)].re, m[(1, 0)])?;
            json!({
                "value": qubit_c2(&params),
                "alpha": 2.0,
                "method": "qubit_closed_form",
                "a": params.a(),
                "b_abs": params.b_sq().sqrt(),
            })
        }
    };
    log::info!("computed {measure:?} on {}", path.display());
    Ok(Output {
        text: format!("{value}\n"),
        violated: false,
    })
}

struct CheckInputs {
    state: Option<PathBuf>,
    channel: Option<PathBuf>,
    ensemble: Option<PathBuf>,
    state2: Option<PathBuf>,
    p1: Option<f64>,
}

fn check(condition: ConditionArg, inputs: &CheckInputs, alphas: &[f64]) -> CliResult<Output> {
    let verdicts: Vec<ConditionVerdict> = match condition {
        ConditionArg::C1 => {
            let rho = load_state(require(&inputs.state, "state")?)?;
            alphas
                .iter()
                .map(|&a| check_c1(&rho, a))
                .collect::<Result<_, _>>()?
        }
        ConditionArg::C2a | ConditionArg::C2b | ConditionArg::Extc2b => {
            let rho = load_state(require(&inputs.state, "state")?)?;
            let channel = load_channel(require(&inputs.channel, "channel")?)?;
            let checker = match condition {
                ConditionArg::C2a => check_c2a,
                ConditionArg::C2b => check_c2b,
                _ => check_extended_c2b,
            };
            alphas
                .iter()
                .map(|&a| checker(&rho, &channel, a))
                .collect::<Result<_, _>>()?
        }
        ConditionArg::C3 => {
            let path = require(&inputs.ensemble, "ensemble")?;
            let ensemble = parse_ensemble(&read(path)?, DEFAULT_TOLERANCE).map_err(|source| {
                CliError::Parse {
                    path: path.to_path_buf(),
                    source,
                }
            })?;
            alphas
                .iter()
                .map(|&a| check_c3(&ensemble, a))
                .collect::<Result<_, _>>()?
        }
        ConditionArg::B3 => {
            let rho1 = load_state(require(&inputs.state, "state")?)?;
            let rho2 = load_state(require(&inputs.state2, "state2")?)?;
            let p1 = inputs
                .p1
                .ok_or_else(|| CliError::Usage("--p1 is required for b3".into()))?;
            alphas
                .iter()
                .map(|&a| check_b3(&rho1, &rho2, p1, a))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(verdict_lines(&verdicts, None))
}

fn verdict_lines(verdicts: &[ConditionVerdict], summary: Option<&AuditSummary>) -> Output {
    let mut text = String::new();
    for v in verdicts {
        text.push_str(&v.to_json_line());
        text.push('\n');
    }
    if let Some(s) = summary {
        text.push_str(&json!({ "summary": s }).to_string());
        text.push('\n');
    }
    Output {
        text,
        violated: verdicts.iter().any(|v| v.violated),
    }
}

fn reproduce(scenario: Scenario, grid: Option<&str>, b: f64, format: Format) -> CliResult<Output> {
    let grid = grid.map(parse_grid).transpose()?;
    let table: SweepTable = match scenario {
        Scenario::Fig1 => reproduce_fig1(&grid.unwrap_or_else(default_subunit_grid))?,
        Scenario::Fig2 => reproduce_fig2(&grid.unwrap_or_else(default_alpha_grid))?,
        Scenario::Fig3 => reproduce_fig3(&grid.unwrap_or_else(default_population_grid))?,
        Scenario::Extc2b => reproduce_extended_c2b(
            &grid.unwrap_or_else(default_subunit_grid),
            Complex64::new(b, 0.0),
        )?,
    };
    log::info!("{} rows for {scenario:?}", table.rows.len());
    let text = match format {
        Format::Csv => table.to_csv(),
        Format::Json => format!(
            "{}\n",
            serde_json::to_string(&table).expect("table serializes")
        ),
    };
    Ok(Output {
        text,
        violated: false,
    })
}

fn run_audit(cfg: &AuditConfig, only: Option<Condition>) -> CliResult<Output> {
    let mut verdicts = audit(cfg)?;
    if let Some(c) = only {
        verdicts.retain(|v| v.condition == c);
    }
    let summary = AuditSummary::from_verdicts(&verdicts);
    log::info!("audit produced {} verdicts", verdicts.len());
    Ok(verdict_lines(&verdicts, Some(&summary)))
}

/// Writes to `path` via a temporary file in the same directory, or to stdout.
fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    let io_err = |source| CliError::Io {
        path: path
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("<stdout>")),
        source,
    };
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io_err)?;
            stdout.flush().map_err(io_err)
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
            tmp.write_all(text.as_bytes()).map_err(io_err)?;
            tmp.persist(p).map_err(|e| io_err(e.error))?;
            Ok(())
        }
    }
}
