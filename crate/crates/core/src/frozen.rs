//! Resonant strong-μ regime with up to two excitations per cavity.
//!
//! Once `|2̃⟩` undercuts `|1̃⟩` (above `mu_c2`) and the repulsion is strong
//! enough to keep the `|1̃⟩` lattice from filling first, the ground state is a
//! `|0⟩/|2̃⟩` crystal. A single photon hop cannot connect `|2̃⟩|0⟩` with
//! `|0⟩|2̃⟩`, so this crystal is frozen.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::defects::select_melted;
use crate::error::{invalid, Error, Result};
use crate::model::{effective_couplings, effective_interaction, photon_transfer_element, ModelParams};
use crate::phase_map::{Axis, Cell, MapLabel, PhaseMap};
use crate::staircase::{select_phase, CrystalPhase, Filling, StaircaseModel};

/// Largest period of the `|2̃⟩` crystals resolved inside the frozen band.
pub const FROZEN_Q_MAX: u32 = 6;

/// Characteristic chemical potentials of the resonant chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResonantThresholds {
    /// Lower edge of the uniform `|1̃⟩` lattice.
    pub mu_c1: f64,
    /// `E_{1−} = E_{2−}`.
    pub mu_c2: f64,
    /// Lower edge of the uniform `|2̃⟩` lattice.
    pub mu_c3: f64,
    /// `E_{2−} = E_{3−}`; the `n ≤ 2` truncation is unreliable beyond it.
    pub mu_23: f64,
    pub strong_plrri: bool,
}

impl ResonantThresholds {
    /// Largest μ the two-excitation truncation is trusted at.
    pub fn truncation_limit(&self) -> f64 {
        self.mu_23.max(self.mu_c3)
    }
}

fn require_resonance(params: &ModelParams) -> Result<()> {
    params.validate()?;
    if params.delta != 0.0 {
        return Err(Error::NotResonant(params.delta));
    }
    Ok(())
}

/// Staircase of `|0⟩/|2̃⟩` crystals: onset at `E_{2−} = 0` and the
/// `J_{2,2}` tail, with two quanta per occupied site.
pub fn frozen_staircase(params: &ModelParams) -> Result<StaircaseModel> {
    require_resonance(params)?;
    let mut m = StaircaseModel::new(
        params.omega - params.g / SQRT_2,
        effective_interaction(2, 2, 1, params)?,
        params.range_cutoff,
    );
    m.excitations_per_site = 2;
    Ok(m)
}

pub fn resonant_thresholds(params: &ModelParams) -> Result<ResonantThresholds> {
    require_resonance(params)?;
    let mu_c1 = StaircaseModel::from_params(params)?.mu_hole(Filling::FULL)?;
    let mu_c2 = params.omega - (SQRT_2 - 1.0) * params.g;
    let mu_c3 = frozen_staircase(params)?.mu_hole(Filling::FULL)?;
    let mu_23 = params.omega - (3f64.sqrt() - SQRT_2) * params.g;
    Ok(ResonantThresholds {
        mu_c1,
        mu_c2,
        mu_c3,
        mu_23,
        strong_plrri: mu_c1 > mu_c2,
    })
}

/// Repulsion `V` above which `mu_c1 > mu_c2`.
///
/// `mu_c1 - μ_c0` is linear in `V`, so one evaluation at unit `V` fixes it.
pub fn critical_repulsion(params: &ModelParams) -> Result<f64> {
    require_resonance(params)?;
    let unit = params.with_v1(1.0);
    let slope = resonant_thresholds(&unit)?.mu_c1 - (params.omega - params.g);
    Ok((2.0 - SQRT_2) * params.g / slope)
}

/// `⟨2̃, 0| a_i† a_j |0, 2̃⟩` at resonance, evaluated in the bare basis.
pub fn frozen_hopping_element(params: &ModelParams) -> Result<f64> {
    photon_transfer_element((2, 0), (0, 2), params.delta, params.g)
}

/// Everything the classifier needs that does not depend on `(μ, t)`.
#[derive(Clone, Debug)]
pub struct ResonantClassifier {
    params: ModelParams,
    thresholds: ResonantThresholds,
    onset: f64,
    v_tilde: f64,
    single: Vec<CrystalPhase>,
    double: Vec<CrystalPhase>,
    double_onset: f64,
    double_v: f64,
    j_perp_per_t: f64,
}

fn relabel(cell: Cell) -> Cell {
    let label = match cell.label {
        MapLabel::Solid | MapLabel::Transition => MapLabel::PhotonSolid,
        MapLabel::Uniform => MapLabel::Uniform1,
        other => other,
    };
    Cell::new(label, cell.filling)
}

impl ResonantClassifier {
    pub fn new(params: &ModelParams, q_max: u32) -> Result<Self> {
        require_resonance(params)?;
        let thresholds = resonant_thresholds(params)?;
        let single_model = StaircaseModel::from_params(params)?;
        let double_model = frozen_staircase(params)?;
        let couplings = effective_couplings(&params.with_t(1.0))?;
        Ok(Self {
            params: *params,
            thresholds,
            onset: single_model.onset,
            v_tilde: single_model.v_tilde(),
            single: single_model.crystals(q_max)?,
            double: double_model.crystals(q_max)?,
            double_onset: double_model.onset,
            double_v: double_model.v_tilde(),
            j_perp_per_t: couplings.j_perp,
        })
    }

    pub fn thresholds(&self) -> &ResonantThresholds {
        &self.thresholds
    }

    fn check_mu(&self, mu: f64) -> Result<()> {
        let th = &self.thresholds;
        let (limit, required) = if self.params.n_max < 2 {
            (th.mu_c2, "n_max = 2")
        } else {
            (th.truncation_limit(), "n_max >= 3")
        };
        if mu > limit {
            return Err(Error::Truncation {
                n_max: self.params.n_max,
                mu,
                required: required.to_string(),
            });
        }
        Ok(())
    }

    /// Frozen-band cell; reads neither `t` nor the hopping.
    fn frozen_cell(&self, mu: f64) -> Cell {
        let inner = select_phase(mu, self.double_onset, self.double_v, &self.double);
        let filling = match inner.label {
            MapLabel::Solid | MapLabel::Uniform => inner.filling,
            _ => None,
        };
        Cell::new(MapLabel::Frozen, filling)
    }

    pub fn classify(&self, mu: f64, t: f64) -> Result<Cell> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(invalid("t", format!("must be finite and non-negative, got {t}")));
        }
        if !mu.is_finite() {
            return Err(invalid("mu", "must be finite"));
        }
        self.check_mu(mu)?;
        let th = &self.thresholds;
        let below_inversion = |mu: f64| {
            relabel(select_melted(
                mu,
                self.onset,
                self.v_tilde,
                self.j_perp_per_t * t,
                &self.single,
            ))
        };
        if th.strong_plrri {
            Ok(if mu < th.mu_c2 {
                below_inversion(mu)
            } else if mu < th.mu_c3 {
                self.frozen_cell(mu)
            } else {
                Cell::new(MapLabel::Uniform2, Some((1, 1)))
            })
        } else {
            Ok(if mu < th.mu_c1 {
                below_inversion(mu)
            } else if mu < th.mu_c2 {
                Cell::new(MapLabel::Uniform1, Some((1, 1)))
            } else {
                Cell::new(MapLabel::Uniform2, Some((1, 1)))
            })
        }
    }
}

/// Single-point form of [`ResonantClassifier::classify`].
pub fn classify_phase(mu: f64, t: f64, params: &ModelParams) -> Result<Cell> {
    ResonantClassifier::new(params, FROZEN_Q_MAX)?.classify(mu, t)
}

/// Resonant phase labels over a `(μ, t)` grid.
pub fn phase5_map(params: &ModelParams, mu_axis: Axis, t_axis: Axis, q_max: u32) -> Result<PhaseMap> {
    mu_axis.check("mu")?;
    t_axis.check("t")?;
    if t_axis.min < 0.0 {
        return Err(invalid("t", "axis must be non-negative"));
    }
    let classifier = ResonantClassifier::new(params, q_max)?;
    classifier.check_mu(mu_axis.max)?;
    let mus = mu_axis.values();
    let rows = t_axis
        .values()
        .par_iter()
        .map(|&t| mus.iter().map(|&mu| classifier.classify(mu, t)).collect())
        .collect::<Result<Vec<Vec<Cell>>>>()?;
    Ok(PhaseMap::new("t", mu_axis, t_axis, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{eigen_energy, Branch, Convention};

    fn paper(v1: f64) -> ModelParams {
        ModelParams::default()
            .with_v1(v1)
            .with_n_max(2)
            .with_convention(Convention::Paper)
    }

    #[test]
    fn zero_repulsion_thresholds() {
        let th = resonant_thresholds(&paper(0.0)).unwrap();
        assert!((th.mu_c1 + 1.0).abs() < 1e-15);
        assert!((th.mu_c2 + 0.414_213_562).abs() < 1e-9);
        assert!(!th.strong_plrri);
    }

    #[test]
    fn mu_c2_is_level_crossing() {
        let th = resonant_thresholds(&paper(0.3)).unwrap();
        let p = paper(0.3).with_mu(th.mu_c2);
        let e1 = eigen_energy(1, Branch::Minus, &p);
        let e2 = eigen_energy(2, Branch::Minus, &p);
        assert!((e1 - e2).abs() < 1e-15);
        let p3 = paper(0.3).with_mu(th.mu_23);
        assert!((eigen_energy(2, Branch::Minus, &p3) - eigen_energy(3, Branch::Minus, &p3)).abs() < 1e-15);
    }

    #[test]
    fn mu_c3_closed_form() {
        let v = 0.8;
        let th = resonant_thresholds(&paper(v)).unwrap();
        let zeta6 = std::f64::consts::PI.powi(6) / 945.0;
        assert!((th.mu_c3 - (-SQRT_2 + v * zeta6) / 2.0).abs() < 1e-10);
        assert!((th.mu_c1 - (-1.0 + v * zeta6)).abs() < 1e-10);
    }

    #[test]
    fn critical_repulsion_value() {
        let v = critical_repulsion(&paper(0.0)).unwrap();
        assert!((v - 0.5760).abs() < 5e-4, "{v}");
        assert!(!resonant_thresholds(&paper(v * 0.999)).unwrap().strong_plrri);
        assert!(resonant_thresholds(&paper(v * 1.001)).unwrap().strong_plrri);
    }

    #[test]
    fn off_resonance_rejected() {
        let p = paper(0.1).with_delta(0.5);
        assert_eq!(resonant_thresholds(&p), Err(Error::NotResonant(0.5)));
        assert!(classify_phase(-1.0, 0.0, &p).is_err());
    }

    #[test]
    fn hopping_elements() {
        for delta in [0.0, 0.7, -2.0] {
            let p = paper(0.0).with_delta(delta);
            assert_eq!(frozen_hopping_element(&p).unwrap(), 0.0);
            let theta = crate::model::mixing_angle(1, delta, 1.0).unwrap();
            let single = photon_transfer_element((1, 0), (0, 1), delta, 1.0).unwrap();
            assert!((single - theta.cos().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn double_windows_are_shifted_single_windows() {
        let p = paper(0.8);
        let single = StaircaseModel::from_params(&p).unwrap();
        let double = frozen_staircase(&p).unwrap();
        for f in [Filling::new(1, 2).unwrap(), Filling::new(1, 3).unwrap()] {
            let s = single.crystal(f).unwrap();
            let d = double.crystal(f).unwrap();
            let shift = |mu: f64| double.onset + (mu - single.onset) / 2.0;
            assert!((d.mu_hole - shift(s.mu_hole)).abs() < 1e-14);
            assert!((d.mu_particle - shift(s.mu_particle)).abs() < 1e-14);
        }
    }

    #[test]
    fn strong_regime_labels() {
        let p = paper(0.8);
        let c = ResonantClassifier::new(&p, FROZEN_Q_MAX).unwrap();
        let th = *c.thresholds();
        assert!(th.strong_plrri);
        let mid = 0.5 * (th.mu_c2 + th.mu_c3);
        let cells: Vec<Cell> = [0.0, 1e-3, 1e-2]
            .iter()
            .map(|&t| c.classify(mid, t).unwrap())
            .collect();
        assert!(cells.iter().all(|x| x.label == MapLabel::Frozen));
        assert!(cells.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(c.classify(-1.5, 0.01).unwrap().label, MapLabel::Vacuum);
        assert!(matches!(c.classify(0.0, 0.0), Err(Error::Truncation { .. })));
    }

    #[test]
    fn weak_regime_labels() {
        let p = paper(0.1);
        let th = resonant_thresholds(&p).unwrap();
        let cell = classify_phase(th.mu_c1 + 0.01, 1e-3, &p).unwrap();
        assert_eq!(cell.label, MapLabel::Uniform1);
        let map = phase5_map(&p, Axis::new(-1.2, -0.33, 60), Axis::new(0.0, 0.02, 5), 6).unwrap();
        assert_eq!(map.count(MapLabel::Frozen), 0);
    }

    #[test]
    fn single_excitation_truncation_refuses_inversion() {
        let p = paper(0.1).with_n_max(1);
        assert!(matches!(
            classify_phase(-0.3, 0.0, &p),
            Err(Error::Truncation { .. })
        ));
        assert!(classify_phase(-0.95, 0.0, &p).is_ok());
    }
}
