//! Flat `key = value` parameter files.
//!
//! Keys mirror the [`ModelParams`] fields, plus the experimental inputs read
//! by [`crate::estimate`]. Unknown keys are rejected by name.

use std::path::Path;

use serde::Deserialize;

use crate::error::{invalid, Error, Result};
use crate::estimate::{ExperimentInputs, FrequencyConvention};
use crate::model::{Convention, ModelParams, RangeCutoff};

/// Parsed file; every key is optional and overlays a base parameter set.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub omega: Option<f64>,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
    pub g: Option<f64>,
    pub mu: Option<f64>,
    pub t: Option<f64>,
    pub v1: Option<f64>,
    pub n_max: Option<u32>,
    pub range_cutoff: Option<RangeCutoff>,
    pub rydberg_weight_exponent: Option<u32>,

    pub frequency_convention: Option<FrequencyConvention>,
    pub eta_c: Option<f64>,
    pub atom_decay: Option<f64>,
    pub n_rydberg: Option<f64>,
    pub cavity_length: Option<f64>,
    pub control_rabi: Option<f64>,
    pub probe_detuning: Option<f64>,
    pub finesse: Option<f64>,
    pub c6: Option<f64>,
    pub site_spacing: Option<f64>,
    pub speed_of_light: Option<f64>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Interaction convention named in the file, if any.
    pub fn convention(&self) -> Result<Option<Convention>> {
        self.rydberg_weight_exponent
            .map(Convention::from_exponent)
            .transpose()
    }

    /// Overlays the file on `base` and validates the result.
    ///
    /// `delta` wins when given; otherwise it is derived from `epsilon`. Both
    /// may appear only if they agree exactly.
    pub fn model_params(&self, base: ModelParams) -> Result<ModelParams> {
        let mut p = base;
        if let Some(x) = self.omega {
            p.omega = x;
        }
        match (self.delta, self.epsilon) {
            (Some(d), Some(e)) if d != p.omega - e => {
                return Err(invalid(
                    "delta",
                    format!("delta = {d} disagrees with omega - epsilon = {}", p.omega - e),
                ))
            }
            (Some(d), _) => p.delta = d,
            (None, Some(e)) => p.delta = p.omega - e,
            (None, None) => {}
        }
        if let Some(x) = self.g {
            p.g = x;
        }
        if let Some(x) = self.mu {
            p.mu = x;
        }
        if let Some(x) = self.t {
            p.t = x;
        }
        if let Some(x) = self.v1 {
            p.v1 = x;
        }
        if let Some(x) = self.n_max {
            p.n_max = x;
        }
        if let Some(x) = self.range_cutoff {
            p.range_cutoff = x;
        }
        if let Some(c) = self.convention()? {
            p.convention = c;
        }
        p.validate()?;
        Ok(p)
    }

    /// Experimental inputs, falling back to the published values.
    pub fn experiment(&self) -> ExperimentInputs {
        let d = ExperimentInputs::default();
        ExperimentInputs {
            frequency_convention: self.frequency_convention.or(d.frequency_convention),
            eta_c: self.eta_c.unwrap_or(d.eta_c),
            atom_decay: self.atom_decay.unwrap_or(d.atom_decay),
            n_rydberg: self.n_rydberg.unwrap_or(d.n_rydberg),
            cavity_length: self.cavity_length.unwrap_or(d.cavity_length),
            control_rabi: self.control_rabi.unwrap_or(d.control_rabi),
            probe_detuning: self.probe_detuning.unwrap_or(d.probe_detuning),
            finesse: self.finesse.unwrap_or(d.finesse),
            c6: self.c6.unwrap_or(d.c6),
            site_spacing: self.site_spacing.unwrap_or(d.site_spacing),
            speed_of_light: self.speed_of_light.unwrap_or(d.speed_of_light),
        }
    }
}
