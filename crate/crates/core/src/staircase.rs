//! Zero-hopping Devil's staircase of commensurate `|1̃⟩` crystals.
//!
//! A crystal at filling `ρ = p/q` is stable between the chemical potential at
//! which removing one excitation costs nothing (`mu_hole`) and the one at
//! which adding one costs nothing (`mu_particle`). Both edges are the
//! single-particle onset plus 1/d⁶ lattice sums over the rearranged crystal.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{
    effective_couplings, first_critical_point, sum_series, LongRangeTail, ModelParams,
    RangeCutoff, Term,
};
use crate::phase_map::{Axis, Cell, MapLabel, PhaseMap};

/// Reduced fraction `p/q` with `0 < p/q <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Filling {
    p: u32,
    q: u32,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Filling {
    pub const FULL: Filling = Filling { p: 1, q: 1 };

    pub fn new(p: u32, q: u32) -> Result<Self> {
        if p == 0 || q == 0 || p > q {
            return Err(invalid("filling", format!("need 0 < p <= q, got {p}/{q}")));
        }
        if gcd(u64::from(p), u64::from(q)) != 1 {
            return Err(invalid("filling", format!("{p}/{q} is not reduced")));
        }
        Ok(Self { p, q })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn q(self) -> u32 {
        self.q
    }

    pub fn value(self) -> f64 {
        f64::from(self.p) / f64::from(self.q)
    }
}

impl Ord for Filling {
    fn cmp(&self, other: &Self) -> Ordering {
        (u64::from(self.p) * u64::from(other.q)).cmp(&(u64::from(other.p) * u64::from(self.q)))
    }
}

impl PartialOrd for Filling {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Filling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

/// Every reduced `p/q` in `(0, 1]` with `q <= q_max`, ascending (Farey order).
pub fn enumerate_fillings(q_max: u32) -> Result<Vec<Filling>> {
    if q_max < 1 {
        return Err(invalid("q_max", "must be at least 1"));
    }
    let n = u64::from(q_max);
    let mut out = Vec::new();
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    while c <= n {
        out.push(Filling {
            p: c as u32,
            q: d as u32,
        });
        let k = (n + b) / d;
        (a, b, c, d) = (c, d, k * c - a, k * d - b);
    }
    Ok(out)
}

/// Distance `r_l` to the `l`-th neighbour in the ideal crystal: `l q / p`
/// when that is an integer, otherwise its floor.
pub fn crystal_distances(filling: Filling, l: u64) -> Result<u64> {
    if l < 1 {
        return Err(invalid("l", "must be at least 1"));
    }
    Ok(l * u64::from(filling.q) / u64::from(filling.p))
}

/// A crystal together with its zero-hopping stability window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrystalPhase {
    pub filling: Filling,
    pub mu_particle: f64,
    pub mu_hole: f64,
    pub width: f64,
    pub distances: Vec<u64>,
}

/// Ingredients of the staircase: where the first excitation appears, how the
/// occupied-site energy moves with μ, and the pair tail `J_∥(d)`.
///
/// Occupied sites carry `excitations_per_site` quanta, so a window edge at
/// interaction cost `S` sits at `onset + S / excitations_per_site`. The
/// ordinary `|0⟩/|1̃⟩` staircase has one quantum per site; the `|0⟩/|2̃⟩`
/// crystal of the strong-μ regime has two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StaircaseModel {
    pub onset: f64,
    pub excitations_per_site: u32,
    pub tail: LongRangeTail,
    /// How many times each crystal pair is counted when the added or removed
    /// excitation interacts with the rest of the crystal. The oracle fixes it
    /// to 1; other values exist only to exercise the consistency checks.
    pub pair_multiplicity: u32,
}

impl StaircaseModel {
    pub fn new(onset: f64, v_tilde: f64, cutoff: RangeCutoff) -> Self {
        Self {
            onset,
            excitations_per_site: 1,
            tail: LongRangeTail::new(v_tilde, cutoff),
            pair_multiplicity: 1,
        }
    }

    /// The `|0⟩/|1̃⟩` staircase of `params` at its effective `Ṽ`.
    pub fn from_params(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        let couplings = effective_couplings(params)?;
        Ok(Self::new(
            first_critical_point(params),
            couplings.v_tilde,
            params.range_cutoff,
        ))
    }

    pub fn with_v_tilde(mut self, v_tilde: f64) -> Self {
        self.tail.v_tilde = v_tilde;
        self
    }

    pub fn v_tilde(&self) -> f64 {
        self.tail.v_tilde
    }

    fn check(&self) -> Result<()> {
        if !self.tail.v_tilde.is_finite() || self.tail.v_tilde < 0.0 {
            return Err(invalid(
                "v_tilde",
                format!("must be finite and non-negative, got {}", self.tail.v_tilde),
            ));
        }
        if !self.onset.is_finite() {
            return Err(invalid("onset", "must be finite"));
        }
        if self.excitations_per_site == 0 || self.pair_multiplicity == 0 {
            return Err(invalid("staircase", "multiplicities must be positive"));
        }
        Ok(())
    }

    fn j(&self, d: u64) -> f64 {
        self.tail.at(d)
    }

    fn admits(&self, d: u64) -> bool {
        self.tail.cutoff.admits(d)
    }

    /// `Σ_{k ≠ f p} [(r_k + 1) J(r_k) - r_k J(r_k + 1)]`: rearrangement of the
    /// pairs whose ideal separation is not a lattice vector.
    fn incommensurate_sum(&self, f: Filling) -> Result<f64> {
        if f.p == 1 {
            return Ok(0.0);
        }
        let p = u64::from(f.p);
        sum_series(|k| {
            let r = k * u64::from(f.q) / p;
            if !self.admits(r) {
                Term::Stop
            } else if k % p == 0 {
                Term::Skip
            } else {
                Term::Value((r + 1) as f64 * self.j(r) - r as f64 * self.j(r + 1))
            }
        })
    }

    fn particle_sum(&self, f: Filling) -> Result<f64> {
        let q = u64::from(f.q);
        sum_series(|k| {
            let kq = k * q;
            if !self.admits(kq - 1) {
                Term::Stop
            } else {
                Term::Value(kq as f64 * self.j(kq - 1) - (kq - 1) as f64 * self.j(kq))
            }
        })
    }

    fn hole_sum(&self, f: Filling) -> Result<f64> {
        let q = u64::from(f.q);
        sum_series(|k| {
            let kq = k * q;
            if !self.admits(kq) {
                Term::Stop
            } else {
                Term::Value((kq + 1) as f64 * self.j(kq) - kq as f64 * self.j(kq + 1))
            }
        })
    }

    fn edge(&self, interaction: f64) -> f64 {
        self.onset + interaction / f64::from(self.excitations_per_site)
    }

    /// Upper window edge: the crystal gains an excitation above it.
    ///
    /// The fully filled lattice has no room for another excitation in this
    /// truncation, so its upper edge is `+∞`.
    pub fn mu_particle(&self, f: Filling) -> Result<f64> {
        self.check()?;
        if f == Filling::FULL {
            return Ok(f64::INFINITY);
        }
        let m = f64::from(self.pair_multiplicity);
        Ok(self.edge(self.incommensurate_sum(f)? + m * self.particle_sum(f)?))
    }

    /// Lower window edge: the crystal loses an excitation below it.
    pub fn mu_hole(&self, f: Filling) -> Result<f64> {
        self.check()?;
        let m = f64::from(self.pair_multiplicity);
        Ok(self.edge(self.incommensurate_sum(f)? + m * self.hole_sum(f)?))
    }

    /// `Δμ_ρ = Σ_k kq [J(kq+1) + J(kq-1) - 2 J(kq)]`, summed directly rather
    /// than as a difference of the two edges.
    pub fn stability_width(&self, f: Filling) -> Result<f64> {
        self.check()?;
        if f == Filling::FULL {
            return Ok(f64::INFINITY);
        }
        let q = u64::from(f.q);
        let s = sum_series(|k| {
            let kq = k * q;
            if !self.admits(kq - 1) {
                Term::Stop
            } else {
                Term::Value(
                    kq as f64 * (self.j(kq + 1) + self.j(kq - 1) - 2.0 * self.j(kq)),
                )
            }
        })?;
        Ok(s / f64::from(self.excitations_per_site))
    }

    pub fn crystal(&self, f: Filling) -> Result<CrystalPhase> {
        let mu_particle = self.mu_particle(f)?;
        let mu_hole = self.mu_hole(f)?;
        let distances = (1..=u64::from(f.q))
            .map(|l| crystal_distances(f, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(CrystalPhase {
            filling: f,
            mu_particle,
            mu_hole,
            width: mu_particle - mu_hole,
            distances,
        })
    }

    /// All crystals with `q <= q_max`, ascending in filling, after checking
    /// that consecutive windows do not overlap.
    pub fn crystals(&self, q_max: u32) -> Result<Vec<CrystalPhase>> {
        let phases = enumerate_fillings(q_max)?
            .into_iter()
            .map(|f| self.crystal(f))
            .collect::<Result<Vec<_>>>()?;
        check_windows(&phases)?;
        Ok(phases)
    }

    /// Crystals whose window intersects `(mu_lo, mu_hi)`, in order of
    /// increasing chemical potential.
    pub fn plateaus_between(&self, mu_lo: f64, mu_hi: f64, q_max: u32) -> Result<Vec<Filling>> {
        let mut phases: Vec<_> = self
            .crystals(q_max)?
            .into_iter()
            .filter(|c| c.mu_particle > c.mu_hole && c.mu_hole < mu_hi && c.mu_particle > mu_lo)
            .collect();
        phases.sort_by(|a, b| a.mu_hole.total_cmp(&b.mu_hole));
        Ok(phases.into_iter().map(|c| c.filling).collect())
    }
}

/// Windows of fillings ascending in ρ must be ordered and disjoint.
pub fn check_windows(phases: &[CrystalPhase]) -> Result<()> {
    for pair in phases.windows(2) {
        let (lo, hi) = (&pair[0], &pair[1]);
        if lo.width <= 0.0 || hi.width <= 0.0 {
            continue;
        }
        let overlap = lo.mu_particle - hi.mu_hole;
        if overlap > 1e-12 * (1.0 + lo.mu_particle.abs()) {
            return Err(Error::OverlappingWindows {
                first: lo.filling.to_string(),
                second: hi.filling.to_string(),
                overlap,
            });
        }
    }
    Ok(())
}

/// Label of a single `(μ, Ṽ)` point given the crystals at that `Ṽ`.
///
/// Points exactly on a window edge are transitions: the gap closes there.
pub fn select_phase(mu: f64, onset: f64, v_tilde: f64, crystals: &[CrystalPhase]) -> Cell {
    if mu < onset {
        return Cell::new(MapLabel::Vacuum, Some((0, 1)));
    }
    if v_tilde == 0.0 {
        return if mu > onset {
            Cell::new(MapLabel::Uniform, Some((1, 1)))
        } else {
            Cell::new(MapLabel::Transition, None)
        };
    }
    for c in crystals {
        if mu > c.mu_hole && mu < c.mu_particle {
            let f = c.filling;
            let label = if f == Filling::FULL {
                MapLabel::Uniform
            } else {
                MapLabel::Solid
            };
            return Cell::new(label, Some((f.p, f.q)));
        }
    }
    Cell::new(MapLabel::Transition, None)
}

/// Filling labels over a `(μ, Ṽ)` grid at zero hopping.
pub fn staircase_map(
    model: &StaircaseModel,
    mu_axis: Axis,
    v_tilde_axis: Axis,
    q_max: u32,
) -> Result<PhaseMap> {
    if q_max < 2 {
        return Err(invalid("q_max", "must be at least 2"));
    }
    mu_axis.check("mu")?;
    v_tilde_axis.check("v_tilde")?;
    if v_tilde_axis.min < 0.0 {
        return Err(invalid("v_tilde", "axis must be non-negative"));
    }
    // Every window edge is onset + Ṽ·(constant), so one table at Ṽ = 1 serves
    // the whole grid and a single overlap check covers every row.
    let unit = model.with_v_tilde(1.0).crystals(q_max)?;
    let rows: Vec<Vec<Cell>> = v_tilde_axis
        .values()
        .par_iter()
        .map(|&vt| {
            let scaled = scale_crystals(&unit, model.onset, vt);
            mu_axis
                .values()
                .iter()
                .map(|&mu| select_phase(mu, model.onset, vt, &scaled))
                .collect()
        })
        .collect();
    Ok(PhaseMap::new("v_tilde", mu_axis, v_tilde_axis, rows))
}

/// Rescales a unit-`Ṽ` crystal table to `v_tilde`.
pub(crate) fn scale_crystals(unit: &[CrystalPhase], onset: f64, v_tilde: f64) -> Vec<CrystalPhase> {
    unit.iter()
        .map(|c| {
            let scale = |mu: f64| {
                if mu.is_infinite() {
                    mu
                } else {
                    onset + (mu - onset) * v_tilde
                }
            };
            CrystalPhase {
                filling: c.filling,
                mu_particle: scale(c.mu_particle),
                mu_hole: scale(c.mu_hole),
                width: if c.width.is_infinite() {
                    c.width
                } else {
                    c.width * v_tilde
                },
                distances: c.distances.clone(),
            }
        })
        .collect()
}
