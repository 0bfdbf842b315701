use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bohrqm::airy::AiryPacketParams;
use bohrqm::campaign::{self, AiryConfig, FlatnessConfig, LPolicy, Method, Quantity, Selection, Tolerances};
use bohrqm::hydrogen::EigenstateSpec;
use bohrqm::report::VerificationReport;
use bohrqm::{PhysicalConstants, UnitSystem};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Overrides the directory that relative `--out` paths resolve against.
const OUT_DIR_ENV: &str = "BOHRQM_OUT_DIR";

#[derive(Parser)]
#[command(name = "bohrqm", version, about = "Madelung-Bohm verification campaigns for hydrogen and the Airy packet")]
struct Cli {
    /// Unit system for all inputs and outputs.
    #[arg(long, global = true, value_enum, default_value_t = Units::Atomic)]
    units: Units,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Units {
    Atomic,
    Si,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileFormat {
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct Output {
    /// csv writes the command's table, json the full verification report.
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    /// Output file; stdout when omitted. Relative paths resolve against $BOHRQM_OUT_DIR if set.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels E_n and the ratio E_n/E_1.
    #[command(after_help = "CSV columns: n,energy,ratio")]
    Levels {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=100))]
        n_max: u32,
        /// Relative tolerance on E_n/E_1 = 1/n^2.
        #[arg(long, default_value_t = Tolerances::default().level_ratio)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Flatness of the quantum potential V_Q = E_n for every state up to n-max.
    #[command(after_help = "CSV columns: case,computed,expected,abs_error,rel_error,pass\n\
        computed is V_Q at the point farthest from E_n; rel_error is the worst relative deviation.")]
    Flatness {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=100))]
        n_max: u32,
        /// Every valid (l, m) (default).
        #[arg(long, conflicts_with = "circular")]
        all_lm: bool,
        /// Only l = n - 1.
        #[arg(long)]
        circular: bool,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        /// Relative tolerance; defaults to 1e-8 (analytic) or 1e-4 (fd).
        #[arg(long)]
        tol: Option<f64>,
        /// Relative shift applied to the expected energies (test hook).
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_energy: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Peak of the radial distribution of l = n - 1 states against n^2 a.
    #[command(after_help = "CSV columns: n,r_peak,expected,rel_error,pass")]
    BohrRadii {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=100))]
        n_max: u32,
        #[arg(long, default_value_t = Tolerances::default().bohr_radius)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Quantum acceleration, hydrodynamic residuals and trajectory of the Airy packet.
    #[command(after_help = "CSV columns: t,x_peak,expected\n\
        x_peak is the displacement of the numerical maximum of |Psi| from its t = 0 position.")]
    Airy {
        #[arg(long = "B")]
        b: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0.3,1")]
        times: Vec<f64>,
        #[arg(long, default_value_t = Tolerances::default().airy_acceleration)]
        tol_acceleration: f64,
        #[arg(long, default_value_t = Tolerances::default().airy_residual)]
        tol_residual: f64,
        #[arg(long, default_value_t = Tolerances::default().airy_bohm)]
        tol_bohm: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sample one quantity for a state or the Airy packet.
    #[command(after_help = "CSV columns: coordinate,value,mask")]
    Profile {
        /// "n,l,m" or "airy".
        #[arg(long, allow_hyphen_values = true)]
        state: String,
        /// P, V, V_bohm, V_q, j or residual.
        #[arg(long)]
        quantity: String,
        #[arg(long, value_enum, default_value_t = ProfileFormat::Csv)]
        format: ProfileFormat,
        /// Output file. Relative paths resolve against $BOHRQM_OUT_DIR if set.
        #[arg(long)]
        out: PathBuf,
        /// Airy packet strength.
        #[arg(long = "B", default_value_t = 1.0)]
        b: f64,
        /// Airy packet time.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Fd,
}

enum Failure {
    Usage(String),
    Run(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Run(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = run(cli);
    let wall = started.elapsed().as_secs_f64();
    match result {
        Ok(Some(report)) => {
            let s = &report.summary;
            eprintln!(
                "{}: {}/{} cases pass, max error {}, wall time {wall:.3} s",
                report.command,
                s.passes,
                s.cases,
                s.max_error.map_or("n/a".into(), |e| format!("{e:.3e}")),
            );
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => {
            let p = resolve(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(&p, text)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn emit(output: &Output, report: &VerificationReport, csv: String) -> Result<(), Failure> {
    let text = match output.format {
        ReportFormat::Csv => csv,
        ReportFormat::Json => report.to_json() + "\n",
    };
    write_out(output.out.as_deref(), &text)
}

fn positive(name: &str, v: f64) -> Result<f64, Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Failure::Usage(format!("{name} must be finite and > 0 (got {v})")))
    }
}

fn run(cli: Cli) -> Result<Option<VerificationReport>, Failure> {
    let constants = PhysicalConstants::preset(match cli.units {
        Units::Atomic => UnitSystem::Atomic,
        Units::Si => UnitSystem::Si,
    });
    match cli.command {
        Command::Levels { n_max, tol, output } => {
            let tol = positive("--tol", tol)?;
            let table = campaign::levels(n_max, &constants)?;
            let report = campaign::levels_report(n_max, &constants, tol)?;
            emit(&output, &report, table.to_csv())?;
            Ok(Some(report))
        }
        Command::Flatness {
            n_max,
            all_lm: _,
            circular,
            method,
            tol,
            perturb_energy,
            output,
        } => {
            let method = match method {
                MethodArg::Analytic => Method::Analytic,
                MethodArg::Fd => Method::Fd,
            };
            let mut cfg = FlatnessConfig::new(n_max, method);
            cfg.constants = constants;
            cfg.policy = if circular { LPolicy::Circular } else { LPolicy::All };
            if let Some(t) = tol {
                cfg.tolerance = positive("--tol", t)?;
            }
            cfg.energy_perturbation = perturb_energy;
            let report = campaign::flatness(&cfg)?;
            emit(&output, &report, report.to_csv())?;
            Ok(Some(report))
        }
        Command::BohrRadii { n_max, tol, output } => {
            let tol = positive("--tol", tol)?;
            let (report, table) = campaign::bohr_radii(n_max, &constants, tol)?;
            emit(&output, &report, table.to_csv())?;
            Ok(Some(report))
        }
        Command::Airy {
            b,
            times,
            tol_acceleration,
            tol_residual,
            tol_bohm,
            output,
        } => {
            let params = AiryPacketParams::new(positive("--B", b)?, constants)?;
            let tolerances = Tolerances {
                airy_acceleration: positive("--tol-acceleration", tol_acceleration)?,
                airy_residual: positive("--tol-residual", tol_residual)?,
                airy_bohm: positive("--tol-bohm", tol_bohm)?,
                ..Tolerances::default()
            };
            if times.is_empty() {
                return Err(Failure::Usage("--times needs at least one value".into()));
            }
            let (report, table) = campaign::airy_campaign(&AiryConfig {
                params,
                times,
                tolerances,
            })?;
            emit(&output, &report, table.to_csv())?;
            Ok(Some(report))
        }
        Command::Profile {
            state,
            quantity,
            format,
            out,
            b,
            t,
        } => {
            let quantity: Quantity = quantity.parse().map_err(|e: bohrqm::Error| Failure::Usage(e.to_string()))?;
            let selection = parse_selection(&state, b, t, constants)?;
            let data = campaign::profile(&selection, quantity)?;
            let text = match format {
                ProfileFormat::Csv => data.to_csv(),
                ProfileFormat::Json => data.to_json() + "\n",
                ProfileFormat::Svg => data.to_svg(),
            };
            write_out(Some(&out), &text)?;
            Ok(None)
        }
    }
}

fn parse_selection(state: &str, b: f64, t: f64, constants: PhysicalConstants) -> Result<Selection, Failure> {
    if state.eq_ignore_ascii_case("airy") {
        if !t.is_finite() {
            return Err(Failure::Usage("--t must be finite".into()));
        }
        let params = AiryPacketParams::new(b, constants).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok(Selection::Airy { params, t });
    }
    let parts: Vec<i64> = state
        .split(',')
        .map(|p| p.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("--state must be n,l,m or airy (got '{state}')")))?;
    let [n, l, m] = parts[..] else {
        return Err(Failure::Usage(format!("--state must be n,l,m or airy (got '{state}')")));
    };
    let qn = bohrqm::QuantumNumbers::new(n, l, m).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(Selection::State(EigenstateSpec::new(qn, constants)))
}
