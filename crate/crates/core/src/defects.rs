//! First-order hopping corrections: mobile defects in a `|1̃⟩` crystal and
//! the melting of the zero-hopping windows into a floating solid.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::phase_map::{Axis, Cell, MapLabel, PhaseMap};
use crate::staircase::{
    enumerate_fillings, scale_crystals, select_phase, CrystalPhase, Filling, StaircaseModel,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DefectKind {
    /// An extra excitation squeezed into the crystal.
    Particle,
    /// A missing excitation.
    Hole,
}

/// Tight-binding band of a single defect in a period-`q` crystal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DefectBand {
    pub kind: DefectKind,
    pub q: u32,
    pub j_perp: f64,
}

impl DefectBand {
    pub fn bandwidth_factor(&self) -> f64 {
        2.0 * f64::from(self.q) * self.j_perp
    }

    pub fn energy(&self, k: f64) -> f64 {
        defect_dispersion(self.kind, self.q, self.j_perp, k)
    }

    pub fn minimum(&self) -> f64 {
        -self.bandwidth_factor()
    }
}

/// `-2 q J_⊥ cos(k q)`; particle- and hole-like defects share the form.
pub fn defect_dispersion(_kind: DefectKind, q: u32, j_perp: f64, k: f64) -> f64 {
    let q = f64::from(q);
    -2.0 * q * j_perp * (k * q).cos()
}

/// Zero-hopping window narrowed by the defect band minima.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeltedBounds {
    pub filling: Filling,
    pub mu_up: f64,
    pub mu_down: f64,
    pub survives: bool,
}

impl MeltedBounds {
    pub fn width(&self) -> f64 {
        self.mu_up - self.mu_down
    }

    pub fn contains(&self, mu: f64) -> bool {
        self.survives && mu > self.mu_down && mu < self.mu_up
    }
}

fn check_j_perp(j_perp: f64) -> Result<()> {
    if !(j_perp.is_finite() && j_perp >= 0.0) {
        return Err(invalid(
            "j_perp",
            format!("must be finite and non-negative, got {j_perp}"),
        ));
    }
    Ok(())
}

fn melt(crystal: &CrystalPhase, j_perp: f64) -> MeltedBounds {
    let shift = 2.0 * f64::from(crystal.filling.q()) * j_perp;
    let mu_up = crystal.mu_particle - shift;
    let mu_down = crystal.mu_hole + shift;
    MeltedBounds {
        filling: crystal.filling,
        mu_up,
        mu_down,
        survives: mu_up > mu_down,
    }
}

/// `μ^up = μ⁰(p) - 2qJ_⊥`, `μ^down = μ⁰(h) + 2qJ_⊥`.
///
/// Non-surviving crystals come back with `survives = false` rather than as
/// an error; the estimate is perturbative, so results with a small positive
/// [`melting_margin`] deserve caution.
pub fn melted_bounds(
    filling: Filling,
    model: &StaircaseModel,
    j_perp: f64,
) -> Result<MeltedBounds> {
    check_j_perp(j_perp)?;
    Ok(melt(&model.crystal(filling)?, j_perp))
}

/// `(Δμ - 4qJ_⊥)/Δμ`: the fraction of the static window that survives.
pub fn melting_margin(bounds: &MeltedBounds, static_width: f64) -> f64 {
    if static_width <= 0.0 {
        return f64::NEG_INFINITY;
    }
    bounds.width() / static_width
}

/// Smallest `Ṽ` at which the crystal survives hopping `j_perp`.
///
/// `Δμ_ρ` is linear in `Ṽ`, so this is `4 q J_⊥ / (Δμ_ρ / Ṽ)`.
pub fn melting_threshold(filling: Filling, j_perp: f64, model: &StaircaseModel) -> Result<f64> {
    check_j_perp(j_perp)?;
    if j_perp == 0.0 {
        return Ok(0.0);
    }
    let per_unit = model.with_v_tilde(1.0).stability_width(filling)?;
    Ok(4.0 * f64::from(filling.q()) * j_perp / per_unit)
}

/// Cell label with hopping `j_perp` switched on.
pub(crate) fn select_melted(
    mu: f64,
    onset: f64,
    v_tilde: f64,
    j_perp: f64,
    crystals: &[CrystalPhase],
) -> Cell {
    if j_perp == 0.0 {
        return select_phase(mu, onset, v_tilde, crystals);
    }
    for c in crystals {
        let b = melt(c, j_perp);
        if b.contains(mu) {
            let f = c.filling;
            let label = if f == Filling::FULL {
                MapLabel::Uniform
            } else {
                MapLabel::Solid
            };
            return Cell::new(label, Some((f.p(), f.q())));
        }
    }
    // A lone |1̃⟩ condenses at the bottom of its band, 2J_⊥ below the onset.
    if mu > onset - 2.0 * j_perp {
        if v_tilde == 0.0 {
            Cell::new(MapLabel::Uniform, None)
        } else {
            Cell::new(MapLabel::Floating, None)
        }
    } else {
        Cell::new(MapLabel::Vacuum, Some((0, 1)))
    }
}

/// Phase labels over `(μ, Ṽ)` at hopping `j_perp`; identical to
/// [`crate::staircase::staircase_map`] when `j_perp = 0`.
pub fn floating_map(
    model: &StaircaseModel,
    mu_axis: Axis,
    v_tilde_axis: Axis,
    j_perp: f64,
    q_max: u32,
) -> Result<PhaseMap> {
    check_j_perp(j_perp)?;
    if q_max < 2 {
        return Err(invalid("q_max", "must be at least 2"));
    }
    mu_axis.check("mu")?;
    v_tilde_axis.check("v_tilde")?;
    if v_tilde_axis.min < 0.0 {
        return Err(invalid("v_tilde", "axis must be non-negative"));
    }
    let unit = model.with_v_tilde(1.0).crystals(q_max)?;
    let rows: Vec<Vec<Cell>> = v_tilde_axis
        .values()
        .par_iter()
        .map(|&vt| {
            let scaled = scale_crystals(&unit, model.onset, vt);
            mu_axis
                .values()
                .iter()
                .map(|&mu| select_melted(mu, model.onset, vt, j_perp, &scaled))
                .collect()
        })
        .collect();
    Ok(PhaseMap::new("v_tilde", mu_axis, v_tilde_axis, rows))
}

/// Fillings (excluding the uniform `ρ = 1`) whose melted window is open at
/// `v_tilde`.
pub fn surviving_solids(
    model: &StaircaseModel,
    v_tilde: f64,
    j_perp: f64,
    q_max: u32,
) -> Result<Vec<Filling>> {
    let m = model.with_v_tilde(v_tilde);
    let mut out = Vec::new();
    for f in enumerate_fillings(q_max)? {
        if f != Filling::FULL && melted_bounds(f, &m, j_perp)?.survives {
            out.push(f);
        }
    }
    Ok(out)
}
