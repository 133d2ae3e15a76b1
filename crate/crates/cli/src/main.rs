//! `cavetic`: near-concentric cavity design, linewidths, spectra and
//! cooperativity from the command line.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::error::{usage, CliError};

#[derive(Parser, Debug)]
#[command(name = "cavetic", version, about = "Near-concentric Fabry-Perot cavity calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Anaclastic lens prescription, cavity length and FSR.
    Design,
    /// Fundamental-mode linewidth versus focusing parameter.
    Linewidth,
    /// Transmission spectrum with and without input aberrations at one u.
    Spectrum,
    /// Cooperativity versus focusing parameter and its maximum.
    Cooperativity,
}

/// Every flag has a config key of the same name with `-` replaced by `_`
/// (and the unit suffix dropped from length flags).
#[derive(Args, Debug, Default)]
struct Opts {
    /// Flat `key = value` config file.
    #[arg(long, global = true, env = "CAVETIC_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,
    /// plano-concave or anaclastic.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Sweep LO:HI:STEP of the focusing parameter.
    #[arg(long, global = true, value_name = "LO:HI:STEP", conflicts_with_all = ["u_list", "u"])]
    u_range: Option<String>,
    /// Comma-separated focusing parameters.
    #[arg(long, global = true, value_name = "U,U,...", conflicts_with = "u")]
    u_list: Option<String>,
    /// Single focusing parameter.
    #[arg(long, global = true, allow_negative_numbers = true)]
    u: Option<f64>,
    /// Distance to the concentric point, micrometers. Replaces the u sweep.
    #[arg(long, global = true, allow_negative_numbers = true)]
    gap_um: Option<f64>,
    /// Mirror aperture radius, millimeters.
    #[arg(long, global = true, allow_negative_numbers = true)]
    aperture_mm: Option<f64>,
    /// Mirror power reflectivity.
    #[arg(long, global = true, allow_negative_numbers = true)]
    reflectivity: Option<f64>,
    /// Mirror radius of curvature, millimeters.
    #[arg(long, global = true, allow_negative_numbers = true)]
    mirror_roc_mm: Option<f64>,
    /// Anaclastic focal length, millimeters.
    #[arg(long, global = true, allow_negative_numbers = true)]
    focal_length_mm: Option<f64>,
    /// Anaclastic lens refractive index.
    #[arg(long, global = true, allow_negative_numbers = true)]
    index: Option<f64>,
    /// Plano-concave substrate refractive index.
    #[arg(long, global = true, allow_negative_numbers = true)]
    substrate_index: Option<f64>,
    /// Plano-concave substrate center thickness, millimeters.
    #[arg(long, global = true, allow_negative_numbers = true)]
    substrate_thickness_mm: Option<f64>,
    /// Vacuum wavelength, nanometers.
    #[arg(long, global = true)]
    wavelength_nm: Option<f64>,
    /// Highest radial mode index in the decomposition.
    #[arg(long, global = true)]
    p_max: Option<u32>,
    /// Spectrum grid density, samples per free spectral range.
    #[arg(long, global = true)]
    samples_per_fsr: Option<usize>,
    /// Spectrum width in free spectral ranges.
    #[arg(long, global = true)]
    span_fsr: Option<f64>,
    /// Gauss-Legendre order of each quadrature panel.
    #[arg(long, global = true)]
    quadrature_order: Option<usize>,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true)]
    quadrature_tol: Option<f64>,
    /// Atomic decay rate, rad/s.
    #[arg(long, global = true)]
    atom_gamma: Option<f64>,
    /// Include input-beam aberrations in the linewidth.
    #[arg(long, global = true)]
    aberrations: bool,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Also write a gnuplot script next to the --out file.
    #[arg(long, global = true)]
    gnuplot: bool,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,
}

impl Opts {
    fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        // Command-line placement of the cavity (sweep or gap) replaces the file's.
        let cli_sweep = self.u_range.is_some() || self.u_list.is_some() || self.u.is_some();
        if cli_sweep || self.gap_um.is_some() {
            cfg.sweep = None;
            cfg.gap = None;
        }
        let mm = |v: Option<f64>| v.map(|x| format!("{x} mm"));
        let text = |v: Option<f64>| v.map(|x| x.to_string());
        let settings = [
            ("family", self.family.clone()),
            ("u_range", self.u_range.clone()),
            ("u_list", self.u_list.clone()),
            ("u", text(self.u)),
            ("gap", self.gap_um.map(|x| format!("{x} um"))),
            ("aperture", mm(self.aperture_mm)),
            ("reflectivity", text(self.reflectivity)),
            ("mirror_roc", mm(self.mirror_roc_mm)),
            ("focal_length", mm(self.focal_length_mm)),
            ("index", text(self.index)),
            ("substrate_index", text(self.substrate_index)),
            ("substrate_thickness", mm(self.substrate_thickness_mm)),
            ("wavelength", self.wavelength_nm.map(|x| format!("{x} nm"))),
            ("p_max", self.p_max.map(|x| x.to_string())),
            ("samples_per_fsr", self.samples_per_fsr.map(|x| x.to_string())),
            ("span_fsr", text(self.span_fsr)),
            ("quadrature_order", self.quadrature_order.map(|x| x.to_string())),
            ("quadrature_tol", text(self.quadrature_tol)),
            ("atom_gamma", text(self.atom_gamma)),
            ("format", self.format.clone()),
            ("jobs", self.jobs.map(|x| x.to_string())),
        ];
        for (key, value) in settings {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if self.aberrations {
            cfg.aberrations = true;
        }
        if self.gnuplot {
            cfg.gnuplot = true;
        }
        if let Some(p) = &self.out {
            cfg.out = Some(p.clone());
        }
        Ok(())
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.opts.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    cli.opts.apply(&mut cfg)?;
    if cli.opts.dump_config {
        print!("{}", cfg.dump());
        return Ok(());
    }
    if cfg.gnuplot && (cfg.out.is_none() || cfg.format == Some(Format::Json)) {
        return usage("gnuplot output needs --out and CSV format");
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return usage("jobs must be at least 1");
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} worker threads: {e}", cfg.jobs.unwrap_or(0))))?;
    let outcome = pool.install(|| match cli.command {
        Command::Design => commands::design(&cfg),
        Command::Linewidth => commands::linewidth(&cfg),
        Command::Spectrum => commands::spectrum(&cfg),
        Command::Cooperativity => commands::cooperativity(&cfg),
    })?;

    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &outcome.body)?;
            if cfg.gnuplot {
                let script = path.with_extension("gp");
                let Some(table) = &outcome.table else {
                    return usage("this command has no plottable table");
                };
                std::fs::write(&script, table.gnuplot(path, outcome.title))?;
            }
        }
        None => print!("{}", outcome.body),
    }
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    for w in &outcome.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
