//! Single-cavity polariton physics and the couplings projected onto the lower
//! polariton branch.
//!
//! Energies are dimensionless; the usual choice is `g = 1`. The `n`-excitation
//! manifold of one cavity is spanned by `|n, G⟩` and `|n-1, R⟩`, and the lower
//! dressed state `|ñ⟩ = cos θ_n |n, G⟩ - sin θ_n |n-1, R⟩` is the only level
//! retained per manifold.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative truncation threshold for the 1/d⁶ lattice sums.
pub const SERIES_REL_TOL: f64 = 1e-12;
/// Hard ceiling on the number of series terms before giving up.
pub const SERIES_MAX_TERMS: u64 = 1_000_000;

/// How the Rydberg admixture weights the van der Waals coupling.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `J_{n,n'} = V sin²θ_n sin²θ_n'`, so `Ṽ = V sin⁴θ₁`.
    #[default]
    Literal,
    /// `J_{n,n'} = V sinθ_n sinθ_n'`, so `Ṽ = V sin²θ₁` (`V/2` at resonance).
    /// This weighting reproduces the `ω - g + 1.0175 V` full-filling point.
    Paper,
}

impl Convention {
    pub fn rydberg_weight_exponent(self) -> u32 {
        match self {
            Convention::Literal => 4,
            Convention::Paper => 2,
        }
    }

    pub fn from_exponent(exponent: u32) -> Result<Self> {
        match exponent {
            4 => Ok(Convention::Literal),
            2 => Ok(Convention::Paper),
            other => Err(invalid(
                "rydberg_weight_exponent",
                format!("must be 2 or 4, got {other}"),
            )),
        }
    }

    /// Per-site factor multiplying `V(d)`; the pair coupling is the product of two.
    fn site_weight(self, theta: f64) -> f64 {
        match self {
            Convention::Literal => theta.sin().powi(2),
            Convention::Paper => theta.sin(),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convention::Literal => f.write_str("literal"),
            Convention::Paper => f.write_str("paper"),
        }
    }
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Convention::Literal),
            "paper" => Ok(Convention::Paper),
            other => Err(invalid(
                "convention",
                format!("expected `literal` or `paper`, got `{other}`"),
            )),
        }
    }
}

/// Largest interaction distance (in sites) retained in lattice sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum RangeCutoff {
    /// Converged infinite series.
    #[default]
    Infinite,
    Sites(u32),
}

impl RangeCutoff {
    pub fn admits(self, d: u64) -> bool {
        match self {
            RangeCutoff::Infinite => true,
            RangeCutoff::Sites(max) => d <= u64::from(max),
        }
    }
}

impl fmt::Display for RangeCutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RangeCutoff::Infinite => f.write_str("inf"),
            RangeCutoff::Sites(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for RangeCutoff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RangeCutoff::Infinite => s.serialize_str("inf"),
            RangeCutoff::Sites(n) => s.serialize_u32(*n),
        }
    }
}

impl<'de> Deserialize<'de> for RangeCutoff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) if n >= 1 && n <= i64::from(u32::MAX) => Ok(RangeCutoff::Sites(n as u32)),
            Raw::Num(n) => Err(serde::de::Error::custom(format!(
                "range_cutoff must be >= 1, got {n}"
            ))),
            Raw::Text(s) if s == "inf" || s == "infinite" => Ok(RangeCutoff::Infinite),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "range_cutoff must be a positive integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// Physical and effective parameters of the extended JCH chain.
///
/// The detuning is stored directly; the two-level transition frequency is
/// derived from it so that `delta = omega - epsilon` is never out of sync.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub delta: f64,
    pub g: f64,
    pub mu: f64,
    pub t: f64,
    pub v1: f64,
    pub n_max: u32,
    pub range_cutoff: RangeCutoff,
    pub convention: Convention,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            omega: 0.0,
            delta: 0.0,
            g: 1.0,
            mu: 0.0,
            t: 0.0,
            v1: 0.0,
            n_max: 1,
            range_cutoff: RangeCutoff::Infinite,
            convention: Convention::Literal,
        }
    }
}

impl ModelParams {
    pub fn epsilon(&self) -> f64 {
        self.omega - self.delta
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega", self.omega),
            ("delta", self.delta),
            ("g", self.g),
            ("mu", self.mu),
            ("t", self.t),
            ("v1", self.v1),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(invalid(name, format!("must be finite, got {value}")));
            }
        }
        if self.g <= 0.0 {
            return Err(invalid("g", format!("must be positive, got {}", self.g)));
        }
        if self.v1 < 0.0 {
            return Err(invalid("v1", format!("must be non-negative, got {}", self.v1)));
        }
        if self.t < 0.0 {
            return Err(invalid("t", format!("must be non-negative, got {}", self.t)));
        }
        if !(1..=2).contains(&self.n_max) {
            return Err(invalid("n_max", format!("must be 1 or 2, got {}", self.n_max)));
        }
        if self.range_cutoff == RangeCutoff::Sites(0) {
            return Err(invalid("range_cutoff", "must be at least 1"));
        }
        Ok(())
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_v1(mut self, v1: f64) -> Self {
        self.v1 = v1;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_n_max(mut self, n_max: u32) -> Self {
        self.n_max = n_max;
        self
    }

    pub fn with_convention(mut self, convention: Convention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_range_cutoff(mut self, cutoff: RangeCutoff) -> Self {
        self.range_cutoff = cutoff;
        self
    }
}

/// Dressed state `|n−⟩` of a single cavity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolaritonLevel {
    pub n: u32,
    pub theta_n: f64,
    pub energy_minus: f64,
    pub rydberg_weight: f64,
    pub photon_weight_minus: f64,
}

impl PolaritonLevel {
    pub fn new(n: u32, params: &ModelParams) -> Result<Self> {
        let theta_n = mixing_angle(n, params.delta, params.g)?;
        let rydberg_weight = if n == 0 { 0.0 } else { theta_n.sin().powi(2) };
        Ok(Self {
            n,
            theta_n,
            energy_minus: eigen_energy(n, Branch::Minus, params),
            rydberg_weight,
            photon_weight_minus: if n == 0 {
                0.0
            } else {
                f64::from(n) - rydberg_weight
            },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// Mixing angle `θ_n = arctan(2g√n/δ)/2`, continued through resonance into
/// `[0, π/2)` so the lower polariton becomes Rydberg-like as `δ → -∞`.
pub fn mixing_angle(n: u32, delta: f64, g: f64) -> Result<f64> {
    if g.is_nan() || g <= 0.0 {
        return Err(invalid("g", format!("must be positive, got {g}")));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let x = 2.0 * g * f64::from(n).sqrt();
    Ok(if delta == 0.0 {
        FRAC_PI_4
    } else if delta > 0.0 {
        (x / delta).atan() / 2.0
    } else {
        ((x / delta).atan() + std::f64::consts::PI) / 2.0
    })
}

/// `E_{n±}^μ = n(ω - μ) + δ/2 ± √(δ²/4 + n g²)`, with `E_0 = 0`.
pub fn eigen_energy(n: u32, branch: Branch, params: &ModelParams) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = f64::from(n);
    let root = (params.delta * params.delta / 4.0 + nf * params.g * params.g).sqrt();
    let base = nf * (params.omega - params.mu) + params.delta / 2.0;
    match branch {
        Branch::Plus => base + root,
        Branch::Minus => base - root,
    }
}

/// Chemical potential at which the first `|1̃⟩` excitation becomes free,
/// i.e. `E_{1-}^μ = 0`.
pub fn first_critical_point(params: &ModelParams) -> f64 {
    let d = params.delta;
    params.omega + d / 2.0 - (d * d / 4.0 + params.g * params.g).sqrt()
}

/// Squared overlap `β_{n,n+1}` of the photon transfer between adjacent
/// lower-polariton manifolds.
pub fn hopping_overlap(n: u32, m: u32, delta: f64, g: f64) -> Result<f64> {
    if m != n + 1 {
        return Err(Error::NonAdjacentManifolds { n, m });
    }
    let tn = mixing_angle(n, delta, g)?;
    let tm = mixing_angle(m, delta, g)?;
    let amp = f64::from(m).sqrt() * tn.cos() * tm.cos() + f64::from(n).sqrt() * tn.sin() * tm.sin();
    Ok(amp * amp)
}

/// Bare van der Waals tail `V(d) = V₁/d⁶`.
pub fn vdw_tail(d: u32, v1: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::DistanceTooShort(d));
    }
    Ok(v1 / f64::from(d).powi(6))
}

/// Projected interaction `J_{n,n'}(d)` between lower polaritons.
pub fn effective_interaction(n: u32, n_prime: u32, d: u32, params: &ModelParams) -> Result<f64> {
    if n == 0 || n_prime == 0 {
        return Err(invalid("n", "interaction is defined between excited manifolds only"));
    }
    let bare = vdw_tail(d, params.v1)?;
    if !params.range_cutoff.admits(u64::from(d)) {
        return Ok(0.0);
    }
    let w = |k| -> Result<f64> {
        Ok(params
            .convention
            .site_weight(mixing_angle(k, params.delta, params.g)?))
    };
    // Weights multiply first so the result is exactly symmetric in n, n'.
    Ok(bare * (w(n)? * w(n_prime)?))
}

/// Hopping and nearest-neighbor repulsion of the `{|0⟩, |1̃⟩}` model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EffectiveCouplings {
    pub j_perp: f64,
    pub v_tilde: f64,
}

pub fn effective_couplings(params: &ModelParams) -> Result<EffectiveCouplings> {
    let theta1 = mixing_angle(1, params.delta, params.g)?;
    let w = params.convention.site_weight(theta1);
    Ok(EffectiveCouplings {
        j_perp: params.t * theta1.cos().powi(2),
        v_tilde: params.v1 * w * w,
    })
}

/// Photons per site in a crystal of `|1̃⟩` states at filling `rho`.
pub fn mean_photon_density(rho: f64, theta_1: f64) -> f64 {
    rho * (1.0 - theta_1.sin().powi(2))
}

/// `J_∥(d) = Ṽ/d⁶` for `d` inside the cutoff, zero beyond it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LongRangeTail {
    pub v_tilde: f64,
    pub cutoff: RangeCutoff,
}

impl LongRangeTail {
    pub fn new(v_tilde: f64, cutoff: RangeCutoff) -> Self {
        Self { v_tilde, cutoff }
    }

    pub fn at(&self, d: u64) -> f64 {
        debug_assert!(d >= 1);
        if self.cutoff.admits(d) {
            self.v_tilde / (d as f64).powi(6)
        } else {
            0.0
        }
    }
}

/// Outcome of evaluating one series term.
pub(crate) enum Term {
    Value(f64),
    /// Excluded term; does not count towards convergence.
    Skip,
    /// Every remaining term vanishes (range cutoff reached).
    Stop,
}

/// Sums `term(1) + term(2) + ...` until a term drops below
/// [`SERIES_REL_TOL`] of the running total.
pub(crate) fn sum_series(mut term: impl FnMut(u64) -> Term) -> Result<f64> {
    let mut acc = 0.0_f64;
    for k in 1..=SERIES_MAX_TERMS {
        match term(k) {
            Term::Stop => return Ok(acc),
            Term::Skip => continue,
            Term::Value(v) => {
                if !v.is_finite() {
                    return Err(Error::NonConvergent { terms: k as usize });
                }
                acc += v;
                if v.abs() <= SERIES_REL_TOL * acc.abs() {
                    return Ok(acc);
                }
            }
        }
    }
    Err(Error::NonConvergent {
        terms: SERIES_MAX_TERMS as usize,
    })
}

/// Single-cavity basis state: photon number and whether the collective atom
/// sits in the Rydberg state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BareState {
    pub photons: u32,
    pub rydberg: bool,
}

/// `|ñ⟩` expanded in the bare basis, with exact zeros for absent components.
pub fn lower_polariton(n: u32, delta: f64, g: f64) -> Result<Vec<(BareState, f64)>> {
    let theta = mixing_angle(n, delta, g)?;
    if n == 0 {
        return Ok(vec![(
            BareState {
                photons: 0,
                rydberg: false,
            },
            1.0,
        )]);
    }
    Ok(vec![
        (
            BareState {
                photons: n,
                rydberg: false,
            },
            theta.cos(),
        ),
        (
            BareState {
                photons: n - 1,
                rydberg: true,
            },
            -theta.sin(),
        ),
    ])
}

fn creation_element(bra: &[(BareState, f64)], ket: &[(BareState, f64)]) -> f64 {
    let mut sum = 0.0;
    for (k, ck) in ket {
        let raised = BareState {
            photons: k.photons + 1,
            rydberg: k.rydberg,
        };
        for (b, cb) in bra {
            if *b == raised {
                sum += cb * ck * f64::from(raised.photons).sqrt();
            }
        }
    }
    sum
}

/// `⟨bra_i, bra_j| a_i† a_j |ket_i, ket_j⟩` for two distinct cavities, with
/// each cavity in a lower-polariton state labelled by its excitation number.
pub fn photon_transfer_element(
    bra: (u32, u32),
    ket: (u32, u32),
    delta: f64,
    g: f64,
) -> Result<f64> {
    let bi = lower_polariton(bra.0, delta, g)?;
    let bj = lower_polariton(bra.1, delta, g)?;
    let ki = lower_polariton(ket.0, delta, g)?;
    let kj = lower_polariton(ket.1, delta, g)?;
    // ⟨bj| a |kj⟩ = ⟨kj| a† |bj⟩ for real amplitudes.
    Ok(creation_element(&bi, &ki) * creation_element(&kj, &bj))
}
