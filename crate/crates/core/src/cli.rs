//! Command-line front end. Exit codes: 0 success, 1 verification failed,
//! 2 input error, 3 I/O error.

use std::ffi::OsString;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::gates::{equivalence_with_tol, fredkin, phase_insensitive_fidelity};
use crate::operator::Operator;
use crate::plan::plan_transition_pulse;
use crate::product::{compose, decompose, Decomposition};
use crate::scalar::C;
use crate::script::{parse_gate, parse_matrix, parse_sequence, parse_terms};
use crate::sequence::{equilibrium_state, prepare_input, run_sequence, Model, RunOptions, Sequence};
use crate::spectrometer::{
    observe_with, readout_pulse, write_peaks_csv, write_spectrum_csv, CouplingMode, FidParams,
};
use crate::spin::{Axis, SpinSystem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "transpulse", version, about = "Transition-pulse gate simulator for coupled spin-1/2 systems")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Spin-system configuration (TOML). Defaults to the built-in three-spin example.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Propagation model for soft pulses.
    #[arg(long, global = true, value_name = "ideal|soft")]
    pub model: Option<String>,
    /// Polarization ε of the initial state.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// Output directory for written files.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Equivalence tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Soft-pulse amplitude miscalibration factor.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub amplitude_scale: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare a sequence's total unitary with a target gate.
    VerifyGate {
        /// Sequence script.
        sequence: PathBuf,
        /// `fredkin` or a matrix file.
        #[arg(long, default_value = "fredkin")]
        target: String,
    },
    /// Run a sequence on an initial state and print its product-operator terms.
    Simulate {
        /// Sequence script.
        sequence: PathBuf,
        /// `eq`, `in`, `mixed` or a term-list file.
        #[arg(long, default_value = "eq")]
        initial: String,
        /// Also write the final density matrix to `<out>/rho.txt`.
        #[arg(long)]
        write_matrix: bool,
    },
    /// Synthesize a spectrum and pick peaks; writes CSV files.
    Spectrum {
        /// Sequence applied to the initial state before acquisition.
        #[arg(long)]
        sequence: Option<PathBuf>,
        /// `eq`, `in`, `mixed` or a term-list file.
        #[arg(long, default_value = "eq")]
        initial: String,
        /// Observed spin; all spins when omitted.
        #[arg(long)]
        window: Option<usize>,
        /// Phase correction, degrees.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
        /// Apply R_y(π/2) to every spin before acquisition.
        #[arg(long)]
        readout: bool,
        /// Coupling model of the acquisition Hamiltonian.
        #[arg(long, default_value = "weak")]
        coupling: String,
    },
    /// Decide whether one selective pulse can realize a transition gate.
    Plan {
        /// Gate spec, e.g. "tcnot 3 2 +".
        #[arg(long)]
        gate: String,
        /// Spectrometer resolution, Hz.
        #[arg(long)]
        resolution: Option<f64>,
    },
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_INPUT,
    }
}

struct Context {
    config: Config,
    config_name: String,
    system: SpinSystem<f64>,
    opts: RunOptions<f64>,
    epsilon: f64,
    tolerance: f64,
    out_dir: PathBuf,
}

impl Context {
    fn new(c: &Common) -> Result<Self> {
        let (config, config_name) = match &c.config {
            Some(p) => (Config::load(p)?, p.display().to_string()),
            None => (Config::alanine_example(), "builtin-example".to_string()),
        };
        let system = config.spin_system()?;
        let model = match &c.model {
            Some(m) => m.parse()?,
            None => Model::Ideal,
        };
        if !(c.amplitude_scale.is_finite() && c.amplitude_scale >= 0.0) {
            return Err(Error::Domain("--amplitude-scale must be non-negative".into()));
        }
        let epsilon = c.epsilon.unwrap_or(config.defaults.epsilon);
        if !epsilon.is_finite() {
            return Err(Error::Domain("--epsilon must be finite".into()));
        }
        let tolerance = c.tolerance.unwrap_or(config.defaults.tolerance);
        if !(tolerance > 0.0) {
            return Err(Error::Domain("--tolerance must be positive".into()));
        }
        Ok(Context {
            config,
            config_name,
            system,
            opts: RunOptions {
                model,
                frame: 0.0,
                amplitude_scale: c.amplitude_scale,
            },
            epsilon,
            tolerance,
            out_dir: c.out.clone().unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    fn header(&self, out: &mut dyn Write, command: &str) -> Result<()> {
        wr(out, format_args!("version: {}\n", env!("CARGO_PKG_VERSION")))?;
        wr(out, format_args!("command: {command}\n"))?;
        wr(out, format_args!("config: {}\n", self.config_name))?;
        wr(out, format_args!("spins: {}\n", self.system.n()))
    }

    fn initial_state(&self, spec: &str) -> Result<Operator<f64>> {
        let n = self.system.n();
        match spec {
            "eq" => equilibrium_state(n, self.epsilon),
            "mixed" => equilibrium_state(n, 0.0),
            "in" => {
                if n != 3 {
                    return Err(Error::Domain("initial state 'in' needs three spins".into()));
                }
                Ok(prepare_input(self.epsilon))
            }
            path => {
                let text = read(Path::new(path))?;
                compose(&parse_terms::<f64>(&text, n, path)?)
            }
        }
    }
}

fn wr(out: &mut dyn Write, args: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(args).map_err(|source| Error::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_sequence(path: &Path) -> Result<Sequence<f64>> {
    parse_sequence(&read(path)?, &path.display().to_string())
}

/// Fixed 9-decimal rendering with trailing zeros removed; `-0` becomes `0`.
pub fn fmt_num(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn fmt_complex(z: C<f64>) -> String {
    let re = fmt_num(z.re);
    let im = fmt_num(z.im);
    match (re.as_str(), im.as_str()) {
        (_, "0") => re,
        ("0", "1") => "i".into(),
        ("0", "-1") => "-i".into(),
        ("0", _) => format!("{im}i"),
        _ if im.starts_with('-') => format!("{re}{im}i"),
        _ => format!("{re}+{im}i"),
    }
}

fn ket(index: usize, n: usize) -> String {
    let bits: String = (0..n)
        .map(|k| if index >> (n - 1 - k) & 1 == 1 { '1' } else { '0' })
        .collect();
    format!("|{bits}>")
}

fn write_decomposition(out: &mut dyn Write, d: &Decomposition<f64>) -> Result<()> {
    wr(out, format_args!("identity: {}\n", fmt_num(d.identity_part)))?;
    wr(out, format_args!("terms: {}\n", d.terms.len()))?;
    for t in &d.terms {
        wr(out, format_args!("term {}: {}\n", t.label(), fmt_num(t.coefficient)))?;
    }
    Ok(())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let file = fs::File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let ctx = Context::new(&cli.common)?;
    match &cli.command {
        Command::VerifyGate { sequence, target } => verify_gate(&ctx, sequence, target, out),
        Command::Simulate {
            sequence,
            initial,
            write_matrix,
        } => simulate(&ctx, sequence, initial, *write_matrix, out),
        Command::Spectrum {
            sequence,
            initial,
            window,
            phase,
            readout,
            coupling,
        } => spectrum_cmd(
            &ctx,
            sequence.as_deref(),
            initial,
            *window,
            *phase,
            *readout,
            coupling,
            out,
        ),
        Command::Plan { gate, resolution } => plan_cmd(&ctx, gate, *resolution, out),
    }
}

fn verify_gate(ctx: &Context, seq_path: &Path, target: &str, out: &mut dyn Write) -> Result<i32> {
    let seq = load_sequence(seq_path)?;
    let n = ctx.system.n();
    let v = match target {
        "fredkin" => {
            if n != 3 {
                return Err(Error::Domain("target 'fredkin' needs three spins".into()));
            }
            fredkin(1, [2, 3], 3)?
        }
        path => {
            let m = parse_matrix::<f64>(&read(Path::new(path))?, path)?;
            if m.dim() != ctx.system.dim() {
                return Err(Error::DimensionMismatch {
                    expected: ctx.system.dim(),
                    got: m.dim(),
                });
            }
            m
        }
    };
    let rho0 = Operator::identity(ctx.system.dim()).scale_real(1.0 / ctx.system.dim() as f64);
    let run = run_sequence(&ctx.system, &seq, &rho0, &ctx.opts)?;
    let rep = equivalence_with_tol(&v, &run.unitary, ctx.tolerance)?;
    let pif = phase_insensitive_fidelity(&run.unitary, &v)?;

    ctx.header(out, "verify-gate")?;
    wr(out, format_args!("sequence: {}\n", seq_path.display()))?;
    wr(out, format_args!("events: {}\n", seq.len()))?;
    wr(out, format_args!("model: {}\n", ctx.opts.model))?;
    wr(out, format_args!("target: {target}\n"))?;
    wr(out, format_args!("tolerance: {:e}\n", ctx.tolerance))?;
    wr(out, format_args!("exact: {}\n", rep.exact))?;
    wr(out, format_args!("global_phase: {}\n", rep.global_phase))?;
    wr(out, format_args!("monomial_phase: {}\n", rep.monomial_phase))?;
    wr(out, format_args!("fidelity: {}\n", fmt_num(rep.fidelity)))?;
    wr(out, format_args!("phase_insensitive_fidelity: {}\n", fmt_num(pif)))?;
    if let Some(table) = &rep.phase_table {
        for p in table {
            wr(out, format_args!("phase {}: {}\n", ket(p.state, n), fmt_complex(p.phase)))?;
        }
    }
    let ok = rep.monomial_phase;
    wr(out, format_args!("verdict: {}\n", if ok { "pass" } else { "fail" }))?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn simulate(ctx: &Context, seq_path: &Path, initial: &str, write_matrix: bool, out: &mut dyn Write) -> Result<i32> {
    let seq = load_sequence(seq_path)?;
    let rho0 = ctx.initial_state(initial)?;
    let run = run_sequence(&ctx.system, &seq, &rho0, &ctx.opts)?;
    let d = decompose(&run.rho)?;

    let matrix_path = ctx.out_dir.join("rho.txt");
    if write_matrix {
        ensure_dir(&ctx.out_dir)?;
        write_file(&matrix_path, |w| {
            for r in 0..run.rho.dim() {
                let row: Vec<String> = run.rho.row(r).iter().map(|z| format!("{},{}", z.re, z.im)).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
            Ok(())
        })?;
    }

    ctx.header(out, "simulate")?;
    wr(out, format_args!("sequence: {}\n", seq_path.display()))?;
    wr(out, format_args!("events: {}\n", seq.len()))?;
    wr(out, format_args!("model: {}\n", ctx.opts.model))?;
    wr(out, format_args!("initial: {initial}\n"))?;
    wr(out, format_args!("epsilon: {}\n", fmt_num(ctx.epsilon)))?;
    wr(out, format_args!("elapsed_s: {}\n", fmt_num(run.elapsed)))?;
    write_decomposition(out, &d)?;
    if write_matrix {
        wr(out, format_args!("matrix: {}\n", matrix_path.display()))?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn spectrum_cmd(
    ctx: &Context,
    seq_path: Option<&Path>,
    initial: &str,
    window: Option<usize>,
    phase: f64,
    readout: bool,
    coupling: &str,
    out: &mut dyn Write,
) -> Result<i32> {
    let mode: CouplingMode = coupling.parse()?;
    if !phase.is_finite() {
        return Err(Error::Domain("--phase must be finite".into()));
    }
    let mut rho = ctx.initial_state(initial)?;
    if let Some(p) = seq_path {
        let seq = load_sequence(p)?;
        rho = run_sequence(&ctx.system, &seq, &rho, &ctx.opts)?.rho;
    }
    let n = ctx.system.n();
    if readout {
        let all: Vec<usize> = (1..=n).collect();
        rho = readout_pulse(&rho, &all, std::f64::consts::FRAC_PI_2, Axis::Y)?;
    }
    let mut params = match window {
        Some(k) => FidParams::for_spin(&ctx.system, k)?,
        None => FidParams::full_band(&ctx.system),
    };
    params.points = ctx.config.defaults.points;
    params.line_broadening = ctx.config.defaults.line_broadening_hz;
    let res = observe_with(&ctx.system, &rho, params, ctx.config.defaults.peak_fraction, phase, mode)?;
    let peaks = &res.peaks;

    let tag = window.map_or("all".to_string(), |k| format!("spin{k}"));
    ensure_dir(&ctx.out_dir)?;
    let spec_path = ctx.out_dir.join(format!("spectrum_{tag}.csv"));
    let peaks_path = ctx.out_dir.join(format!("peaks_{tag}.csv"));
    write_file(&spec_path, |w| write_spectrum_csv(w, &res.spectrum))?;
    write_file(&peaks_path, |w| write_peaks_csv(w, peaks))?;

    ctx.header(out, "spectrum")?;
    wr(out, format_args!("initial: {initial}\n"))?;
    if let Some(p) = seq_path {
        wr(out, format_args!("sequence: {}\n", p.display()))?;
        wr(out, format_args!("model: {}\n", ctx.opts.model))?;
    }
    wr(out, format_args!("readout: {readout}\n"))?;
    wr(out, format_args!("window: {tag}\n"))?;
    wr(out, format_args!("coupling: {mode}\n"))?;
    wr(out, format_args!("phase_correction_deg: {}\n", fmt_num(phase)))?;
    wr(out, format_args!("receiver_hz: {}\n", fmt_num(res.params.receiver_offset)))?;
    wr(out, format_args!("spectral_width_hz: {}\n", fmt_num(res.params.spectral_width())))?;
    wr(out, format_args!("points: {}\n", res.params.points))?;
    wr(out, format_args!("line_broadening_hz: {}\n", fmt_num(res.params.line_broadening)))?;
    wr(out, format_args!("peaks: {}\n", peaks.len()))?;
    for p in peaks {
        let who = match (p.ambiguous, p.spin) {
            (true, _) => "ambiguous".to_string(),
            (false, Some(k)) => format!("spin {k} spectators {}", p.spectator_label()),
            (false, None) => "unassigned".to_string(),
        };
        wr(
            out,
            format_args!(
                "peak {}: magnitude {} phase_deg {} {who}\n",
                fmt_num(p.freq),
                fmt_num(p.amplitude.norm()),
                fmt_num(p.phase_deg)
            ),
        )?;
    }
    wr(out, format_args!("spectrum_csv: {}\n", spec_path.display()))?;
    wr(out, format_args!("peaks_csv: {}\n", peaks_path.display()))?;
    Ok(EXIT_OK)
}

fn plan_cmd(ctx: &Context, gate: &str, resolution: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let g = parse_gate::<f64>(gate)?;
    let resolution = resolution.unwrap_or(ctx.config.defaults.resolution_hz);
    let plan = plan_transition_pulse(&ctx.system, &g, resolution)?;
    ctx.header(out, "plan")?;
    let lines: Vec<String> = plan.target_lines.iter().map(|&f| fmt_num(f)).collect();
    wr(out, format_args!("gate: {g}\n"))?;
    wr(out, format_args!("target_spin: {}\n", plan.target_spin))?;
    wr(out, format_args!("target_lines: {}\n", lines.join(" ")))?;
    wr(out, format_args!("spread_hz: {}\n", fmt_num(plan.spread)))?;
    wr(out, format_args!("required_selectivity_hz: {}\n", fmt_num(plan.required_selectivity)))?;
    wr(out, format_args!("resolution_hz: {}\n", fmt_num(plan.resolution)))?;
    wr(out, format_args!("single_pulse_feasible: {}\n", plan.single_pulse_feasible))?;
    wr(out, format_args!("pulses_required: {}\n", plan.pulses_required))?;
    Ok(if plan.single_pulse_feasible {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}
