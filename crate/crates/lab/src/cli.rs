//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use ovaplug::datagen::{verify_holder, verify_margin};
use ovaplug::kernels::{gaussian_kernel, validate_kernel};
use ovaplug::ova::{effective_sample_size, theory_bandwidth, PlugInModel, DEFAULT_GUARD};
use ovaplug::rate::{classify_regime, theoretical_exponent, ExponentAxis, Setting};
use ovaplug::risk::{deviation_probability, excess_risk_oracle};

use crate::config::{ExperimentConfig, ProblemSpec};
use crate::error::{LabError, LabResult};
use crate::experiment::{run_experiment, summary_path};
use crate::samples::{load_sample, save_sample};

#[derive(Debug, Parser)]
#[command(name = "ovaplug", version, about = "Local polynomial plug-in classification experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a rate experiment from a config file
    Rate {
        config: PathBuf,
    },
    /// Train once and estimate the excess risk
    Risk {
        #[command(flatten)]
        problem: ProblemSpec,
        #[arg(long, default_value_t = 1024)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        n_test: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train on this sample file instead of drawing one
        #[arg(long)]
        train: Option<PathBuf>,
    },
    /// Estimate P(|eta_hat_j(x) - eta_j(x)| >= delta) across sample sizes
    Deviation {
        #[command(flatten)]
        problem: ProblemSpec,
        #[arg(long, value_delimiter = ',', default_values_t = [256, 1024, 4096])]
        n: Vec<usize>,
        /// Query point, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        x: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        class: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Check the kernel conditions for the Gaussian kernel
    ValidateKernel {
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        beta: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Check the margin and smoothness claims of a distribution
    VerifyDist {
        #[command(flatten)]
        problem: ProblemSpec,
        #[arg(long, default_value_t = 1_000_000)]
        probes: usize,
        #[arg(long, default_value_t = 100_000)]
        pairs: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3])]
        t: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the rate exponent and regime for given parameters
    Regime {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "drift-or-iid")]
        setting: SettingArg,
        /// Mixing exponent; `inf` for the iid limit
        #[arg(long, default_value_t = f64::INFINITY)]
        c3: f64,
    },
    /// Draw a training sample and write it to a file
    Sample {
        #[command(flatten)]
        problem: ProblemSpec,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SettingArg {
    Mixing,
    DriftOrIid,
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit code. Normal output goes to `out`, errors to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> LabResult<()> {
    out.write_fmt(text)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| LabError::io("<stdout>", e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => { emit($out, format_args!($($arg)*)) };
}

fn execute(command: Command, out: &mut dyn Write) -> LabResult<()> {
    match command {
        Command::Rate { config } => {
            let config = ExperimentConfig::load(&config)?;
            let report = run_experiment(&config)?;
            let fit = &report.fit;
            for (x, r) in fit.ns.iter().zip(&fit.mean_risks) {
                say!(out, "{}={x} mean_oracle_excess={r:.6e}", fit.x_axis.as_str())?;
            }
            say!(out, "fitted_slope={:.4}", fit.fitted_slope)?;
            say!(out, "intercept={:.4}", fit.intercept)?;
            say!(out, "r_squared={:.4}", fit.r_squared)?;
            say!(out, "theoretical_exponent={:.4}", fit.theoretical_exponent)?;
            say!(out, "regime={}", fit.regime)?;
            say!(out, "x_axis={}", fit.x_axis.as_str())?;
            if let Some(raw) = fit.raw_n_slope {
                say!(out, "raw_n_slope={raw:.4}")?;
            }
            if let Some(path) = &config.output {
                say!(out, "wrote {} and {}", path.display(), summary_path(path).display())?;
            }
        }
        Command::Risk {
            problem,
            n,
            n_test,
            seed,
            train,
        } => {
            let dist = problem.distribution()?;
            let regime = problem.training_regime(&dist)?;
            let sample = match train {
                Some(path) => load_sample(&path)?,
                None => regime.sample(&dist, n, seed),
            };
            let mixing = regime.mixing_spec();
            let n = sample.len();
            let h = theory_bandwidth(n, dist.beta(), dist.dim(), mixing.as_ref())?;
            if let Some(spec) = &mixing {
                say!(out, "n_e={}", effective_sample_size(n, spec)?)?;
            }
            let model = PlugInModel::fit(sample, dist.beta(), h, gaussian_kernel(dist.dim()), DEFAULT_GUARD)?;
            let risk = excess_risk_oracle(&model, &dist, n_test, seed)?;
            say!(out, "n={n}")?;
            say!(out, "bandwidth={h:.6}")?;
            say!(out, "oracle_excess={:.6e}", risk.oracle_excess)?;
            say!(out, "std_error={:.6e}", risk.std_error)?;
            say!(out, "zero_one_excess={:.6e}", risk.zero_one_excess)?;
        }
        Command::Deviation {
            problem,
            n,
            x,
            class,
            delta,
            replicates,
            seed,
        } => {
            let dist = problem.distribution()?;
            let regime = problem.training_regime(&dist)?;
            for size in n {
                let p = deviation_probability(&dist, &regime, size, class, &x, delta, replicates, seed)?;
                say!(out, "n={size} probability={p:.4}")?;
            }
        }
        Command::ValidateKernel { d, beta, tol } => {
            if d == 0 || !(beta > 0.0) || !(tol > 0.0) {
                return Err(LabError::Config("d, beta and tol must be positive".into()));
            }
            let kernel = gaussian_kernel(d);
            let r = validate_kernel(&kernel, beta, d, tol);
            say!(out, "kernel={} d={d} beta={beta}", kernel.name())?;
            say!(out, "lower_bound c={} holds={} margin={:.3e}", kernel.lower_bound_constant(), r.lower_bound_holds, r.lower_bound_margin)?;
            say!(out, "integral={:.9} tail={:.2e} ok={}", r.integral, r.integral_tail, r.integrates_to_one)?;
            say!(out, "sup={:.6} ok={}", r.sup_condition_value, r.sup_is_finite)?;
            say!(out, "square_integral={:.6} tail={:.2e} ok={}", r.square_integral_value, r.square_integral_tail, r.square_integral_is_finite)?;
            say!(out, "valid={}", r.is_valid())?;
            if !r.is_valid() {
                return Err(LabError::Core(ovaplug::Error::Numeric("kernel conditions not met")));
            }
        }
        Command::VerifyDist {
            problem,
            probes,
            pairs,
            t,
            seed,
        } => {
            let dist = problem.distribution()?;
            let margin = verify_margin(&dist, probes, &t, seed)?;
            say!(out, "margin alpha={} C0={}", dist.alpha(), dist.margin_constant())?;
            for c in &margin.checks {
                say!(out, "  t={} estimate={:.6} bound={:.6} se={:.2e} pass={}", c.t, c.estimate, c.bound, c.std_error, c.passes)?;
            }
            if let Some(slope) = margin.slope {
                say!(out, "  log-log slope={slope:.4}")?;
            }
            let holder = verify_holder(&dist, pairs, seed)?;
            say!(out, "holder beta={} L={:.6}", dist.beta(), holder.holder_constant)?;
            say!(out, "  max ratio={:.6} within={}", holder.overall_max(), holder.within_constant())?;
            if !(margin.all_pass() && holder.within_constant()) {
                return Err(LabError::Core(ovaplug::Error::Numeric("distribution checks failed")));
            }
        }
        Command::Regime {
            alpha,
            beta,
            d,
            setting,
            c3,
        } => {
            if d == 0 || !(beta > 0.0) || !(alpha >= 0.0) || !(c3 > 0.0) {
                return Err(LabError::Config("need alpha >= 0 and positive beta, d, c3".into()));
            }
            let (setting, axis) = match setting {
                SettingArg::Mixing => (Setting::Mixing, ExponentAxis::MixingEffectiveN),
                SettingArg::DriftOrIid => (Setting::DriftOrIid, ExponentAxis::DriftOrIid),
            };
            say!(out, "regime={}", classify_regime(alpha, beta, d, setting, c3))?;
            say!(out, "exponent={}", theoretical_exponent(alpha, beta, d, axis, c3))?;
            if setting == Setting::Mixing {
                let raw = theoretical_exponent(alpha, beta, d, ExponentAxis::MixingRawN, c3);
                say!(out, "raw_n_exponent={raw}")?;
            }
        }
        Command::Sample {
            problem,
            n,
            seed,
            output,
        } => {
            if n == 0 {
                return Err(LabError::Config("n must be positive".into()));
            }
            let dist = problem.distribution()?;
            let regime = problem.training_regime(&dist)?;
            save_sample(&output, &regime.sample(&dist, n, seed))?;
            say!(out, "wrote {} observations to {}", n, output.display())?;
        }
    }
    Ok(())
}
