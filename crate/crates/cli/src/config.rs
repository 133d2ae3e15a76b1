//! Run configuration: flat `key = value` files, command-line overrides and
//! validation against the model's preconditions.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cavetic_core::anaclastic::{self, design_with_reflectivity};
use cavetic_core::cqed::AtomParameters;
use cavetic_core::numerics::QuadratureSettings;
use cavetic_core::spectrum::{
    uniform_grid, AnaclasticFamily, CavityFamily, CurveSettings, PlanoConcaveFamily, SAMPLES_PER_FSR,
};
use cavetic_core::{OpticalConstants, DEFAULT_WAVELENGTH};

use crate::error::{usage, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Family {
    PlanoConcave,
    #[default]
    Anaclastic,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "plano-concave" => Ok(Self::PlanoConcave),
            "anaclastic" => Ok(Self::Anaclastic),
            other => usage(format!("unknown cavity family `{other}` (plano-concave, anaclastic)")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PlanoConcave => "plano-concave",
            Self::Anaclastic => "anaclastic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => usage(format!("unknown output format `{other}` (csv, json)")),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Csv => "csv",
            Self::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Range { lo: f64, hi: f64, step: f64 },
    List(Vec<f64>),
}

impl Sweep {
    /// Parses `LO:HI:STEP`.
    pub fn parse_range(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let [lo, hi, step] = parts.as_slice() else {
            return usage(format!("u range `{s}` must be LO:HI:STEP"));
        };
        Ok(Self::Range {
            lo: number("u_range", lo)?,
            hi: number("u_range", hi)?,
            step: number("u_range", step)?,
        })
    }

    /// Parses a comma-separated list.
    pub fn parse_list(s: &str) -> Result<Self, CliError> {
        let values = s
            .split(',')
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(|v| number("u_list", v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::List(values))
    }

    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let us = match self {
            Self::Range { lo, hi, step } => {
                if !(step > &0.0) || hi < lo {
                    return usage(format!("empty u sweep {lo}:{hi}:{step}"));
                }
                if lo == hi {
                    vec![*lo]
                } else {
                    uniform_grid(*lo, *hi, *step).map_err(|e| CliError::Usage(e.to_string()))?
                }
            }
            Self::List(v) => v.clone(),
        };
        if us.is_empty() {
            return usage("empty u sweep");
        }
        if let Some(bad) = us.iter().find(|u| !(**u > 0.0) || !u.is_finite()) {
            return usage(format!("focusing parameter must be positive, got {bad}"));
        }
        Ok(us)
    }

    fn dump(&self, out: &mut String) {
        match self {
            Self::Range { lo, hi, step } => {
                let _ = writeln!(out, "u_range = {lo}:{hi}:{step}");
            }
            Self::List(v) => {
                let items: Vec<String> = v.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "u_list = {}", items.join(","));
            }
        }
    }
}

/// Every setting a subcommand may read. `None` means the family default.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub family: Family,
    pub sweep: Option<Sweep>,
    pub gap: Option<f64>,
    pub aperture: Option<f64>,
    pub reflectivity: Option<f64>,
    pub mirror_roc: Option<f64>,
    pub focal_length: Option<f64>,
    pub index: Option<f64>,
    pub substrate_index: Option<f64>,
    pub substrate_thickness: Option<f64>,
    pub wavelength: Option<f64>,
    pub p_max: Option<u32>,
    pub samples_per_fsr: Option<usize>,
    pub span_fsr: Option<f64>,
    pub quadrature_order: Option<usize>,
    pub quadrature_tol: Option<f64>,
    pub atom_gamma: Option<f64>,
    pub aberrations: bool,
    /// `None` leaves the choice to the subcommand.
    pub format: Option<Format>,
    pub gnuplot: bool,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
}

fn number(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.trim()
        .parse::<f64>()
        .map_err(|_| CliError::Usage(format!("`{key}`: expected a number, got `{raw}`")))
}

/// Length with an optional `m`, `mm`, `um`/`µm` or `nm` suffix; bare numbers are meters.
pub fn length(key: &str, raw: &str) -> Result<f64, CliError> {
    let raw = raw.trim();
    let units = [("mm", 1e-3), ("um", 1e-6), ("µm", 1e-6), ("nm", 1e-9), ("m", 1.0)];
    let (value, scale) = units
        .iter()
        .find_map(|(u, scale)| raw.strip_suffix(u).map(|v| (v, *scale)))
        .unwrap_or((raw, 1.0));
    if value.trim_end().ends_with(|c: char| c.is_alphabetic()) && !value.trim_end().ends_with(['e', 'E']) {
        return usage(format!("`{key}`: unknown length unit in `{raw}`"));
    }
    Ok(number(key, value)? * scale)
}

fn boolean(key: &str, raw: &str) -> Result<bool, CliError> {
    match raw.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => usage(format!("`{key}`: expected true or false, got `{other}`")),
    }
}

fn integer<I: std::str::FromStr>(key: &str, raw: &str) -> Result<I, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("`{key}`: expected a nonnegative integer, got `{raw}`")))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return usage(format!("line {}: expected `key = value`", n + 1));
            };
            cfg.set(key.trim(), value.trim())
                .map_err(|e| CliError::Usage(format!("line {}: {}", n + 1, e.message())))?;
        }
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "family" => self.family = Family::parse(value)?,
            "u_range" => self.set_sweep(Sweep::parse_range(value)?)?,
            "u_list" => self.set_sweep(Sweep::parse_list(value)?)?,
            "u" => self.set_sweep(Sweep::List(vec![number(key, value)?]))?,
            "gap" => self.gap = Some(length(key, value)?),
            "aperture" => self.aperture = Some(length(key, value)?),
            "mirror_roc" => self.mirror_roc = Some(length(key, value)?),
            "focal_length" => self.focal_length = Some(length(key, value)?),
            "substrate_thickness" => self.substrate_thickness = Some(length(key, value)?),
            "wavelength" => self.wavelength = Some(length(key, value)?),
            "reflectivity" => self.reflectivity = Some(number(key, value)?),
            "index" => self.index = Some(number(key, value)?),
            "substrate_index" => self.substrate_index = Some(number(key, value)?),
            "span_fsr" => self.span_fsr = Some(number(key, value)?),
            "quadrature_tol" => self.quadrature_tol = Some(number(key, value)?),
            "atom_gamma" => self.atom_gamma = Some(number(key, value)?),
            "p_max" => self.p_max = Some(integer(key, value)?),
            "samples_per_fsr" => self.samples_per_fsr = Some(integer(key, value)?),
            "quadrature_order" => self.quadrature_order = Some(integer(key, value)?),
            "jobs" => self.jobs = Some(integer(key, value)?),
            "aberrations" => self.aberrations = boolean(key, value)?,
            "gnuplot" => self.gnuplot = boolean(key, value)?,
            "format" => self.format = Some(Format::parse(value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            other => return usage(format!("unknown config key `{other}`")),
        }
        Ok(())
    }

    fn set_sweep(&mut self, sweep: Sweep) -> Result<(), CliError> {
        if self.sweep.is_some() {
            return usage("give only one of u, u_list and u_range");
        }
        self.sweep = Some(sweep);
        Ok(())
    }

    /// Effective configuration as a config file that reproduces this run.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "family = {}", self.family.name());
        if let Some(s) = &self.sweep {
            s.dump(&mut out);
        }
        let lengths = [
            ("gap", self.gap),
            ("aperture", self.aperture),
            ("mirror_roc", self.mirror_roc),
            ("focal_length", self.focal_length),
            ("substrate_thickness", self.substrate_thickness),
            ("wavelength", self.wavelength),
        ];
        for (k, v) in lengths {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {v} m");
            }
        }
        let plain = [
            ("reflectivity", self.reflectivity),
            ("index", self.index),
            ("substrate_index", self.substrate_index),
            ("span_fsr", self.span_fsr),
            ("quadrature_tol", self.quadrature_tol),
            ("atom_gamma", self.atom_gamma),
        ];
        for (k, v) in plain {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        let counts = [
            ("p_max", self.p_max.map(|v| v as usize)),
            ("samples_per_fsr", self.samples_per_fsr),
            ("quadrature_order", self.quadrature_order),
            ("jobs", self.jobs),
        ];
        for (k, v) in counts {
            if let Some(v) = v {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        let _ = writeln!(out, "aberrations = {}", self.aberrations);
        let _ = writeln!(out, "gnuplot = {}", self.gnuplot);
        if let Some(f) = self.format {
            let _ = writeln!(out, "format = {}", f.name());
        }
        if let Some(p) = &self.out {
            let _ = writeln!(out, "out = {}", p.display());
        }
        out
    }

    pub fn constants(&self) -> Result<OpticalConstants<f64>, CliError> {
        OpticalConstants::new(self.wavelength.unwrap_or(DEFAULT_WAVELENGTH)).map_err(CliError::from_validation)
    }

    pub fn quadrature(&self) -> Result<QuadratureSettings<f64>, CliError> {
        let d = QuadratureSettings::<f64>::default();
        QuadratureSettings::new(
            self.quadrature_order.unwrap_or(d.rule.order()),
            self.quadrature_tol.unwrap_or(d.rel_tol),
            d.initial_panels,
        )
        .map_err(CliError::from_validation)
    }

    pub fn curve_settings(&self) -> Result<CurveSettings<f64>, CliError> {
        let samples_per_fsr = self.samples_per_fsr.unwrap_or(SAMPLES_PER_FSR);
        if samples_per_fsr < 8 {
            return usage(format!("samples_per_fsr must be at least 8, got {samples_per_fsr}"));
        }
        Ok(CurveSettings {
            constants: self.constants()?,
            quadrature: self.quadrature()?,
            p_max: self.p_max.unwrap_or(cavetic_core::decomposition::DEFAULT_P_MAX),
            samples_per_fsr,
        })
    }

    pub fn atom(&self) -> Result<AtomParameters<f64>, CliError> {
        match self.atom_gamma {
            Some(g) => AtomParameters::new(g).map_err(CliError::from_validation),
            None => Ok(AtomParameters::rubidium_d2()),
        }
    }

    pub fn anaclastic(&self) -> Result<AnaclasticFamily<f64>, CliError> {
        if self.substrate_index.is_some() || self.substrate_thickness.is_some() {
            return usage("substrate settings apply only to the plano-concave family");
        }
        let prescription = design_with_reflectivity(
            self.focal_length.unwrap_or(anaclastic::DEFAULT_FOCAL_LENGTH),
            self.index.unwrap_or(anaclastic::DEFAULT_INDEX),
            self.mirror_roc.unwrap_or(anaclastic::DEFAULT_MIRROR_ROC),
            self.reflectivity.unwrap_or(anaclastic::DEFAULT_REFLECTIVITY),
        )
        .map_err(CliError::from_validation)?;
        let aperture = self.aperture.unwrap_or(anaclastic::DEFAULT_APERTURE);
        positive("aperture", aperture)?;
        if aperture > prescription.half_axis_b {
            return usage(format!(
                "aperture {aperture} m exceeds the lens half-axis b = {} m",
                prescription.half_axis_b
            ));
        }
        Ok(AnaclasticFamily { prescription, aperture })
    }

    pub fn plano_concave(&self) -> Result<PlanoConcaveFamily<f64>, CliError> {
        if self.focal_length.is_some() || self.index.is_some() {
            return usage("focal_length and index apply only to the anaclastic family");
        }
        let d = PlanoConcaveFamily::<f64>::default();
        let f = PlanoConcaveFamily {
            mirror_roc: self.mirror_roc.unwrap_or(d.mirror_roc),
            aperture: self.aperture.unwrap_or(d.aperture),
            reflectivity: self.reflectivity.unwrap_or(d.reflectivity),
            substrate_index: self.substrate_index.unwrap_or(d.substrate_index),
            substrate_thickness: self.substrate_thickness.unwrap_or(d.substrate_thickness),
        };
        positive("mirror_roc", f.mirror_roc)?;
        positive("aperture", f.aperture)?;
        if f.aperture >= f.mirror_roc {
            return usage(format!(
                "aperture {} m must be smaller than the mirror radius {} m",
                f.aperture, f.mirror_roc
            ));
        }
        if !(f.reflectivity > 0.0 && f.reflectivity < 1.0) {
            return usage(format!("reflectivity must lie in (0, 1), got {}", f.reflectivity));
        }
        if !(f.substrate_index >= 1.0) || !f.substrate_index.is_finite() {
            return usage(format!("substrate index must be at least 1, got {}", f.substrate_index));
        }
        if !(f.substrate_thickness >= 0.0) || !f.substrate_thickness.is_finite() {
            return usage(format!(
                "substrate thickness must be nonnegative, got {}",
                f.substrate_thickness
            ));
        }
        Ok(f)
    }

    pub fn cavity_family(&self) -> Result<CavityFamily<f64>, CliError> {
        Ok(match self.family {
            Family::PlanoConcave => CavityFamily::PlanoConcave(self.plano_concave()?),
            Family::Anaclastic => CavityFamily::Anaclastic(self.anaclastic()?),
        })
    }
}

fn positive(key: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        usage(format!("{key} must be positive, got {v}"))
    }
}
