//! Hardware-scale estimates of `g`, `κ`, `t` and `V₁` from cavity and atom
//! data, reported next to the published figures.
//!
//! Inputs are SI (hertz, metres). Whether the frequency inputs are ordinary
//! (`f = ω/2π`) or angular must be declared; outputs are angular and can be
//! shown per 2π.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// How the frequency-valued inputs (`Γ`, `Ω`, `Δ_p`, `C₆`) are expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrequencyConvention {
    /// Cycles per second; multiplied by 2π internally.
    Ordinary,
    /// Radians per second.
    Angular,
}

impl FrequencyConvention {
    fn to_angular(self) -> f64 {
        match self {
            FrequencyConvention::Ordinary => 2.0 * PI,
            FrequencyConvention::Angular => 1.0,
        }
    }
}

impl std::str::FromStr for FrequencyConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(FrequencyConvention::Ordinary),
            "angular" => Ok(FrequencyConvention::Angular),
            other => Err(invalid(
                "frequency_convention",
                format!("expected `ordinary` or `angular`, got `{other}`"),
            )),
        }
    }
}

/// Cavity, ensemble and lattice data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExperimentInputs {
    pub frequency_convention: Option<FrequencyConvention>,
    /// Cooperativity-like coupling efficiency (dimensionless).
    pub eta_c: f64,
    /// Single-atom decay `Γ`.
    pub atom_decay: f64,
    /// Atoms per ensemble `N_R`.
    pub n_rydberg: f64,
    /// Cavity length in metres.
    pub cavity_length: f64,
    /// Control Rabi frequency `Ω`.
    pub control_rabi: f64,
    /// Probe detuning `Δ_p`.
    pub probe_detuning: f64,
    pub finesse: f64,
    /// Van der Waals coefficient in frequency × m⁶.
    pub c6: f64,
    /// Distance between neighbouring ensembles in metres.
    pub site_spacing: f64,
    pub speed_of_light: f64,
}

impl Default for ExperimentInputs {
    /// Published values, in ordinary frequency units; the convention flag is
    /// left unset on purpose.
    fn default() -> Self {
        Self {
            frequency_convention: None,
            eta_c: 0.01,
            atom_decay: 0.55e3,
            n_rydberg: 5e4,
            cavity_length: 10e-3,
            control_rabi: 100e6,
            probe_detuning: 1e9,
            finesse: 500.0,
            c6: 610e9 * 1e-36,
            site_spacing: 2.4e-6,
            speed_of_light: 3e8,
        }
    }
}

/// Derived couplings, all in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EstimatedParams {
    pub inputs: ExperimentInputs,
    pub gamma: f64,
    pub g0: f64,
    pub g: f64,
    pub kappa: f64,
    pub t: f64,
    pub v1: f64,
    /// Stark shift `g₀²/Δ_p`; reported only, never used in energies.
    pub lambda: f64,
}

pub fn estimate_parameters(inputs: &ExperimentInputs) -> Result<EstimatedParams> {
    let conv = inputs.frequency_convention.ok_or(Error::MissingUnitFlag)?;
    let checks = [
        ("eta_c", inputs.eta_c),
        ("atom_decay", inputs.atom_decay),
        ("n_rydberg", inputs.n_rydberg),
        ("cavity_length", inputs.cavity_length),
        ("control_rabi", inputs.control_rabi),
        ("probe_detuning", inputs.probe_detuning),
        ("finesse", inputs.finesse),
        ("c6", inputs.c6),
        ("site_spacing", inputs.site_spacing),
        ("speed_of_light", inputs.speed_of_light),
    ];
    for (name, v) in checks {
        if !(v.is_finite() && v > 0.0) {
            return Err(invalid(name, format!("must be positive, got {v}")));
        }
    }
    let w = conv.to_angular();
    let c = inputs.speed_of_light;
    let len = inputs.cavity_length;
    let f = inputs.finesse;
    let gamma = inputs.n_rydberg * inputs.atom_decay * w;
    let g0 = (inputs.eta_c * gamma * c / len).sqrt();
    let g = inputs.n_rydberg.sqrt() * g0 * inputs.control_rabi / inputs.probe_detuning;
    let kappa = PI * c / (f * len);
    let t = kappa * (f / (2.0 * PI)).sqrt();
    let v1 = inputs.c6 * w / inputs.site_spacing.powi(6);
    let lambda = g0 * g0 / (inputs.probe_detuning * w);
    Ok(EstimatedParams {
        inputs: *inputs,
        gamma,
        g0,
        g,
        kappa,
        t,
        v1,
        lambda,
    })
}

/// How a formula value compares with the published one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Agreement {
    Match,
    Discrepancy,
    ConventionUnclear,
    NotQuoted,
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agreement::Match => "match",
            Agreement::Discrepancy => "discrepancy",
            Agreement::ConventionUnclear => "convention unclear",
            Agreement::NotQuoted => "-",
        })
    }
}

/// One line of the parameter table, frequencies per 2π in hertz.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamRow {
    pub name: &'static str,
    pub formula_hz: f64,
    pub published_hz: Option<f64>,
    pub agreement: Agreement,
}

const MATCH_REL_TOL: f64 = 0.02;

fn row(name: &'static str, rad: f64, published_hz: Option<f64>, unclear: bool) -> ParamRow {
    let formula_hz = rad / (2.0 * PI);
    let agreement = match published_hz {
        None => Agreement::NotQuoted,
        Some(p) if ((formula_hz - p) / p).abs() <= MATCH_REL_TOL => Agreement::Match,
        Some(_) if unclear => Agreement::ConventionUnclear,
        Some(_) => Agreement::Discrepancy,
    };
    ParamRow {
        name,
        formula_hz,
        published_hz,
        agreement,
    }
}

impl EstimatedParams {
    /// Formula values beside the published ones.
    pub fn comparison(&self) -> Vec<ParamRow> {
        vec![
            row("gamma", self.gamma, None, false),
            row("g0", self.g0, None, false),
            row("g", self.g, Some(2.03e9), false),
            row("kappa", self.kappa, Some(30e6), false),
            row("t", self.t, Some(628e6), false),
            row("V1", self.v1, Some(500e6), true),
            row("lambda", self.lambda, None, false),
        ]
    }
}
