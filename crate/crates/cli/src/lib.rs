//! Configuration-driven front end for the qreadout analyses.
//!
//! Each subcommand reads a flat key-value configuration (file plus flag
//! overrides, flags win), validates it completely before running, and writes
//! plot-ready CSV or JSON tables tagged with the configuration hash.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Plan;
use crate::config::Settings;

/// Exit status for a successful run or a clean validation.
pub const EXIT_OK: i32 = 0;
/// Exit status when an analysis fails at run time.
pub const EXIT_COMPUTE: i32 = 1;
/// Exit status for configuration problems.
pub const EXIT_CONFIG: i32 = 2;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "QREADOUT_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "qreadout", version, about = "Dispersive-readout simulations and calibration fits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Key-value configuration file (`key = value` per line, `#` comments).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for output files [default: $QREADOUT_OUTPUT_DIR or ./out].
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    /// Seed for every Monte-Carlo draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// List every configuration problem and exit without running.
    #[arg(long, global = true)]
    pub validate: bool,

    /// Extra `key=value` override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

/// Declares an argument struct whose optional string flags map onto
/// configuration keys of the same name.
macro_rules! key_flags {
    ($name:ident { $($(#[$doc:meta])* $field:ident),* $(,)? }) => {
        #[derive(Debug, Clone, Default, Args)]
        pub struct $name {
            $(
                $(#[$doc])*
                #[arg(long)]
                pub $field: Option<String>,
            )*
        }

        impl $name {
            pub fn pairs(&self) -> Vec<(&'static str, String)> {
                let mut pairs = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        pairs.push((stringify!($field), v.clone()));
                    }
                )*
                pairs
            }
        }
    };
}

key_flags!(BackactionArgs {
    /// Emitted photon numbers: `lo:hi:step`, a comma list, or one value.
    n_grid,
    /// Cells of the repeated thermal map.
    n_cells,
    /// Fock cutoff of the coherent simulation (automatic when absent).
    dim,
});

key_flags!(SnrArgs {
    /// `coherent`, `thermal` or `both`.
    source,
    /// Emitted photon numbers.
    n_grid,
    /// Amplitude detection efficiency.
    eta,
    /// Heterodyne shots per class for coherent light.
    shots,
    /// Records per class for thermal light (half train, half score).
    thermal_shots,
    /// Thermal record length, seconds.
    duration,
});

key_flags!(ThermoArgs {
    /// `coherent`, `thermal`, `single_photon` or `all`.
    family,
    /// Photon numbers.
    n_grid,
    /// A single photon number (alternative to `--n-grid`).
    n,
    /// Fock cutoff.
    dim,
    /// Demon temperature for the erasure cost, kelvin.
    t_demon,
});

key_flags!(ScatterArgs {
    /// Cavity linewidth κ/2π, Hz.
    kappa_hz,
    /// Resonance splitting χ/2π, Hz.
    chi_hz,
    /// Hot-bath occupancy (flat baths).
    nbar_hot,
    /// Cold-bath occupancy (flat baths).
    nbar_cold,
    /// Hot-bath temperature, kelvin (blackbody baths).
    t_hot,
    /// Cold-bath temperature, kelvin (blackbody baths).
    t_cold,
    /// Cavity frequency for blackbody occupancies, Hz.
    carrier_hz,
    /// Detuning points.
    points,
    /// Half span of the detuning grid, Hz.
    span_hz,
    /// Signal duration, seconds.
    duration,
});

key_flags!(CalibrateArgs {
    /// `spectrum`, `saturation` or `photons`.
    kind,
    /// Measured data CSV (synthetic data when absent).
    input,
    /// Qubit line shift per photon, Hz.
    peak_spacing_hz,
    /// Cavity linewidth κ/2π, Hz.
    kappa_hz,
    /// Highest Fock peak in the model.
    n_max,
    /// `poisson` or `geometric`.
    distribution,
    /// `thermal_on`, `thermal_off` or `coherent`.
    linewidth_mode,
    /// Starting photon number of the fit.
    init_nbar,
    /// Starting intrinsic FWHM, Hz.
    init_gamma_hz,
    /// Synthetic photon number.
    true_nbar,
    /// Synthetic intrinsic FWHM, Hz.
    gamma_hz,
    /// Synthetic frequency grid, Hz.
    freq_grid,
    /// Synthetic noise, relative to the peak (spectrum) or the largest value (saturation).
    noise,
    /// Synthetic saturation scale A.
    a,
    /// Synthetic saturation power B.
    b,
    /// Synthetic drive powers.
    p_grid,
    /// Count both resonances when integrating emitted photons.
    two_resonance,
});

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Qubit coherence against emitted photons for the three sources.
    Backaction(BackactionArgs),
    /// Monte-Carlo readout SNR against emitted photons.
    Snr(SnrArgs),
    /// Field entropy, mutual information and erasure cost.
    Thermo(ThermoArgs),
    /// Symmetric two-port cavity detector spectra and integrated signal.
    Scatter(ScatterArgs),
    /// Photon-number calibration fits.
    Calibrate(CalibrateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Backaction(_) => "backaction",
            Command::Snr(_) => "snr",
            Command::Thermo(_) => "thermo",
            Command::Scatter(_) => "scatter",
            Command::Calibrate(_) => "calibrate",
        }
    }

    fn pairs(&self) -> Vec<(&'static str, String)> {
        match self {
            Command::Backaction(a) => a.pairs(),
            Command::Snr(a) => a.pairs(),
            Command::Thermo(a) => a.pairs(),
            Command::Scatter(a) => a.pairs(),
            Command::Calibrate(a) => a.pairs(),
        }
    }
}

/// Merges the config file, global flags, `--set` pairs and command flags,
/// in increasing precedence.
pub fn settings(cli: &Cli) -> Result<Settings, Vec<String>> {
    let mut settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    if let Some(seed) = cli.seed {
        settings.set("seed", seed.to_string());
    }
    if let Some(threads) = cli.threads {
        settings.set("threads", threads.to_string());
    }
    if let Some(dir) = &cli.output_dir {
        settings.set("output_dir", dir.to_string_lossy());
    }
    let mut errors = Vec::new();
    for pair in &cli.set {
        match pair.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() => settings.set(k, v.trim()),
            _ => errors.push(format!("--set expects KEY=VALUE, got `{pair}`")),
        }
    }
    for (k, v) in cli.command.pairs() {
        settings.set(k, v);
    }
    if errors.is_empty() {
        Ok(settings)
    } else {
        Err(errors)
    }
}

fn output_dir(settings: &Settings) -> PathBuf {
    settings
        .get("output_dir")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"))
}

/// Parses arguments, runs the command and returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let command = cli.command.name();
    let plan = settings(&cli).and_then(|s| Plan::build(command, &s).map(|p| (s, p)));
    let (settings, plan) = match plan {
        Ok(ok) => ok,
        Err(violations) => {
            for v in &violations {
                eprintln!("violation: {v}");
            }
            return EXIT_CONFIG;
        }
    };
    if cli.validate {
        // an empty violation report
        return EXIT_OK;
    }
    if let Some(threads) = plan.threads {
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let dir = output_dir(&settings);
    let hash = settings.hash(command);
    match plan.execute(&dir, &hash) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}
