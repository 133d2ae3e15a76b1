//! Subcommand bodies. Each returns its table plus lines for stderr.

use serde::Serialize;

use cavetic_core::anaclastic::{concentric_cavity, AnaclasticPrescription};
use cavetic_core::cqed::{cooperativity_curve, optimize_u, CqedPoint};
use cavetic_core::optics::{focusing_parameter, free_spectral_range, mirror_waist, CavityGeometry};
use cavetic_core::spectrum::{
    aberrated_lines, fundamental_lines, predicted_linewidth_curve, uniform_grid, CavityFamily, CurvePoint,
    MIN_SAMPLES_PER_FWHM,
};
use cavetic_core::CavityError;

use crate::config::{Family, Format, RunConfig, Sweep};
use crate::error::{usage, CliError};
use crate::output::{col, Cell, Table};

/// Grid points allowed in one synthesized spectrum.
const MAX_SPECTRUM_SAMPLES: f64 = 2e7;

pub struct Outcome {
    pub body: String,
    /// Present when the body is a table that a gnuplot script can read.
    pub table: Option<Table>,
    pub title: &'static str,
    pub summary: Vec<String>,
    pub warnings: Vec<String>,
}

impl Outcome {
    fn table(table: Table, format: Format, title: &'static str) -> Self {
        Self {
            body: table.render(format),
            table: Some(table),
            title,
            summary: Vec::new(),
            warnings: Vec::new(),
        }
    }
}

const MM: f64 = 1e3;

#[derive(Serialize)]
struct DesignReport {
    prescription: AnaclasticPrescription<f64>,
    eccentricity: f64,
    vertex_roc_m: f64,
    aperture_m: f64,
    concentric_length_m: f64,
    cavity_length_m: f64,
    fsr_hz: f64,
}

pub fn design(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.family != Family::Anaclastic {
        return usage("design applies to the anaclastic family only");
    }
    let family = cfg.anaclastic()?;
    let p = family.prescription;
    let constants = cfg.constants()?;
    let geometry = match cfg.gap {
        Some(gap) => concentric_cavity(&p, gap, family.aperture).map_err(CliError::from_validation)?,
        None => CavityGeometry::from_gap(p.mirror_roc, 0.0, family.aperture, p.mirror_reflectivity)
            .map_err(CliError::from_validation)?,
    };
    let report = DesignReport {
        prescription: p,
        eccentricity: p.eccentricity(),
        vertex_roc_m: p.vertex_roc(),
        aperture_m: family.aperture,
        concentric_length_m: p.concentric_length(),
        cavity_length_m: geometry.length(),
        fsr_hz: free_spectral_range(&geometry, &constants),
    };
    let format = cfg.format.unwrap_or(Format::Json);
    let mut table = Table::new(vec![
        col("quantity", "text"),
        col("value", "see unit"),
        col("unit", "text"),
    ]);
    let rows = [
        ("focal_length", p.focal_length, "m"),
        ("refractive_index", p.refractive_index, "1"),
        ("half_axis_a", p.half_axis_a, "m"),
        ("half_axis_b", p.half_axis_b, "m"),
        ("eccentricity", report.eccentricity, "1"),
        ("vertex_roc", report.vertex_roc_m, "m"),
        ("mirror_roc", p.mirror_roc, "m"),
        ("mirror_reflectivity", p.mirror_reflectivity, "1"),
        ("aperture", report.aperture_m, "m"),
        ("concentric_length", report.concentric_length_m, "m"),
        ("cavity_length", report.cavity_length_m, "m"),
        ("fsr", report.fsr_hz, "Hz"),
    ];
    for (q, v, u) in rows {
        table.push(vec![Cell::Text(q.into()), Cell::Num(v), Cell::Text(u.into())]);
    }
    let body = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => table.to_csv(),
    };
    Ok(Outcome {
        body,
        table: None,
        title: "anaclastic design",
        summary: vec![
            format!(
                "ellipsoid half-axes a = {:.4} mm, b = {:.4} mm, eccentricity {:.5}",
                p.half_axis_a * MM,
                p.half_axis_b * MM,
                report.eccentricity
            ),
            format!(
                "cavity length {:.4} mm (concentric {:.4} mm), FSR {:.4} GHz",
                report.cavity_length_m * MM,
                report.concentric_length_m * MM,
                report.fsr_hz * 1e-9
            ),
        ],
        warnings: Vec::new(),
    })
}

fn u_for_gap(family: &CavityFamily<f64>, gap: f64, cfg: &RunConfig) -> Result<f64, CliError> {
    let geometry = CavityGeometry::from_gap(family.mirror_roc(), gap, family.aperture(), family.reflectivity())
        .map_err(CliError::from_validation)?;
    let w = mirror_waist(&geometry, &cfg.constants()?).map_err(CliError::from_validation)?;
    Ok(focusing_parameter(w, geometry.length()))
}

/// Focusing parameters to evaluate: from the gap, the configured sweep or `default`.
fn sweep(cfg: &RunConfig, family: &CavityFamily<f64>, default: Sweep) -> Result<Vec<f64>, CliError> {
    match (cfg.gap, &cfg.sweep) {
        (Some(_), Some(_)) => usage("give either a gap or a u sweep, not both"),
        (Some(gap), None) => Ok(vec![u_for_gap(family, gap, cfg)?]),
        (None, Some(s)) => s.points(),
        (None, None) => default.points(),
    }
}

fn error_text(points: &[&CurvePoint<f64>]) -> Cell {
    let msgs: Vec<String> = points
        .iter()
        .filter_map(|p| p.fwhm.as_ref().err().map(CavityError::to_string))
        .collect();
    if msgs.is_empty() {
        Cell::Empty
    } else {
        Cell::Text(msgs.join("; "))
    }
}

pub fn linewidth(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = cfg.cavity_family()?;
    let default = match cfg.family {
        Family::Anaclastic => Sweep::Range {
            lo: 0.05,
            hi: 0.8,
            step: 0.05,
        },
        Family::PlanoConcave => Sweep::List(vec![0.02, 0.03, 0.04, 0.047]),
    };
    let us = sweep(cfg, &family, default)?;
    let settings = cfg.curve_settings()?;
    let model = predicted_linewidth_curve(&family, &us, false, &settings);
    let aberrated = cfg
        .aberrations
        .then(|| predicted_linewidth_curve(&family, &us, true, &settings));

    let mut columns = vec![col("u", "1"), col("fwhm_model_hz", "Hz")];
    if aberrated.is_some() {
        columns.extend([
            col("fwhm_aberrated_hz", "Hz"),
            col("excess", "1"),
            col("skipped_modes", "count"),
        ]);
    }
    columns.push(col("error", "text"));
    let mut table = Table::new(columns);
    table.note("family", Cell::Text(cfg.family.name().into()));
    table.note("p_max", Cell::Int(settings.p_max.into()));

    let mut failures = 0;
    for (i, m) in model.iter().enumerate() {
        let mut row = vec![Cell::Num(m.u), Cell::opt(m.fwhm.as_ref().ok().copied())];
        let mut involved = vec![m];
        if let Some(ab) = &aberrated {
            let a = &ab[i];
            let excess = match (&m.fwhm, &a.fwhm) {
                (Ok(m), Ok(a)) => Some(a / m - 1.0),
                _ => None,
            };
            row.extend([
                Cell::opt(a.fwhm.as_ref().ok().copied()),
                Cell::opt(excess),
                Cell::Int(a.skipped.len() as u64),
            ]);
            involved.push(a);
        }
        let err = error_text(&involved);
        if err != Cell::Empty {
            failures += 1;
        }
        row.push(err);
        table.push(row);
    }
    if failures == us.len() {
        let first = model
            .iter()
            .chain(aberrated.iter().flatten())
            .find_map(|p| p.fwhm.clone().err())
            .expect("every point failed");
        return Err(first.into());
    }
    let format = cfg.format.unwrap_or(Format::Csv);
    let mut out = Outcome::table(table, format, "cavity linewidth");
    out.summary
        .push(format!("{} points, {} with errors", us.len(), failures));
    if failures > 0 {
        out.warnings
            .push(format!("{failures} sweep points failed; see the error column"));
    }
    Ok(out)
}

pub fn spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let family = cfg.cavity_family()?;
    let default_u = match cfg.family {
        Family::Anaclastic => 0.365,
        Family::PlanoConcave => 0.047,
    };
    let us = sweep(cfg, &family, Sweep::List(vec![default_u]))?;
    let [u] = us.as_slice() else {
        return usage(format!("spectrum takes a single u, got {}", us.len()));
    };
    let u = *u;
    let settings = cfg.curve_settings()?;
    let span = cfg.span_fsr.unwrap_or(1.0);
    if !(span > 0.0) || span * settings.samples_per_fsr as f64 > MAX_SPECTRUM_SAMPLES {
        return usage(format!(
            "span_fsr must be positive and span_fsr * samples_per_fsr at most {MAX_SPECTRUM_SAMPLES:e}, got {span}"
        ));
    }
    family
        .geometry(u, &settings.constants)
        .map_err(CliError::from_validation)?;

    let retardance = family.retardance(&settings.constants)?;
    let aberrated = aberrated_lines(&family, u, &retardance, &settings)?;
    let ideal = fundamental_lines(&family, u, &settings)?;
    let fsr = ideal.fsr;
    let step = fsr / settings.samples_per_fsr as f64;
    let half = 0.5 * span * fsr;
    let grid = uniform_grid(-half, half, step)?;
    let with = aberrated.synthesize(grid.clone())?;
    let without = ideal.synthesize(grid)?;
    let fwhm_aberrated = aberrated.fwhm(settings.samples_per_fsr)?;
    let fwhm_ideal = ideal.fwhm(settings.samples_per_fsr)?;

    let mut table = Table::new(vec![
        col("detuning_hz", "Hz"),
        col("transmission_aberrated", "1"),
        col("transmission_ideal", "1"),
    ]);
    table.note("family", Cell::Text(cfg.family.name().into()));
    table.note("u", Cell::Num(u));
    table.note("fsr_hz", Cell::Num(fsr));
    table.note("fwhm_aberrated_hz", Cell::Num(fwhm_aberrated));
    table.note("fwhm_ideal_hz", Cell::Num(fwhm_ideal));
    table.note("lines", Cell::Int(aberrated.lines.len() as u64));
    table.note("skipped_modes", Cell::Int(aberrated.skipped.len() as u64));
    for ((d, a), i) in with.detuning.iter().zip(&with.transmission).zip(&without.transmission) {
        table.push(vec![Cell::Num(*d), Cell::Num(*a), Cell::Num(*i)]);
    }

    let format = cfg.format.unwrap_or(Format::Csv);
    let mut out = Outcome::table(table, format, "transmission spectrum");
    out.summary.push(format!(
        "u = {u}: FWHM {:.4} MHz with aberrations, {:.4} MHz without",
        fwhm_aberrated * 1e-6,
        fwhm_ideal * 1e-6
    ));
    let narrowest = aberrated.narrowest().unwrap_or(fwhm_ideal).min(fwhm_ideal);
    if narrowest / step < MIN_SAMPLES_PER_FWHM as f64 {
        out.warnings.push(format!(
            "grid step {step:.4e} Hz resolves the narrowest line ({narrowest:.4e} Hz) with fewer than {MIN_SAMPLES_PER_FWHM} samples; raise samples_per_fsr"
        ));
    }
    Ok(out)
}

pub fn cooperativity(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.family != Family::Anaclastic {
        return usage("cooperativity applies to the anaclastic family only");
    }
    let family = cfg.anaclastic()?;
    let cavity = CavityFamily::Anaclastic(family);
    let us = sweep(
        cfg,
        &cavity,
        Sweep::Range {
            lo: 0.05,
            hi: 1.0,
            step: 0.05,
        },
    )?;
    let atom = cfg.atom()?;
    let constants = cfg.constants()?;
    let points = cooperativity_curve(&family, &us, &atom, &constants)?;

    let lo = us.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = us.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let best_sampled = |pts: &[CqedPoint<f64>]| {
        *pts.iter()
            .max_by(|a, b| a.cooperativity.total_cmp(&b.cooperativity))
            .expect("sweep is nonempty")
    };
    let (best, at_boundary) = if hi > lo {
        match optimize_u(&family, &atom, &constants, lo, hi) {
            Ok(p) => (p, false),
            Err(CavityError::Bracket(_)) => (best_sampled(&points), true),
            Err(e) => return Err(e.into()),
        }
    } else {
        (best_sampled(&points), true)
    };

    let mut table = Table::new(vec![
        col("u", "1"),
        col("R_sc", "1"),
        col("g0_rad_s", "rad/s"),
        col("kappa_rad_s", "rad/s"),
        col("finesse", "1"),
        col("C", "1"),
        col("V_eff_lambda3", "lambda^3"),
    ]);
    table.note("family", Cell::Text(cfg.family.name().into()));
    table.note("atom_gamma_rad_s", Cell::Num(atom.gamma));
    table.note("u_opt", Cell::Num(best.u));
    table.note("C_opt", Cell::Num(best.cooperativity));
    table.note("optimum_at_boundary", Cell::Text(at_boundary.to_string()));
    for p in &points {
        table.push(vec![
            Cell::Num(p.u),
            Cell::Num(p.r_sc),
            Cell::Num(p.g0),
            Cell::Num(p.kappa),
            Cell::Num(p.finesse),
            Cell::Num(p.cooperativity),
            Cell::Num(p.v_eff_lambda3),
        ]);
    }
    let format = cfg.format.unwrap_or(Format::Csv);
    let mut out = Outcome::table(table, format, "single-atom cooperativity");
    out.summary.push(format!(
        "maximum cooperativity C = {:.2} at u = {:.4}",
        best.cooperativity, best.u
    ));
    if hi == lo {
        out.warnings
            .push(format!("single-point sweep at u = {lo}; no maximum searched"));
    } else if at_boundary {
        out.warnings.push(format!(
            "cooperativity maximum lies at the edge of the sweep [{lo}, {hi}]; widen the u range"
        ));
    }
    Ok(out)
}
