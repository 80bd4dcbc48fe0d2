//! Brute-force ground states on small periodic rings.
//!
//! Everything here is computed from the lattice Hamiltonian directly: the
//! on-site lower-polariton energies plus the projected 1/d⁶ pair couplings at
//! minimum-image ring distance. No staircase formula is consulted, so these
//! solvers serve as an independent check on the analytic windows.

mod ed;

pub use ed::{exact_diagonalize, sector_spectrum, SectorSpectrum, SpectrumResult, ED_MAX_DIMENSION};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{effective_interaction, eigen_energy, Branch, ModelParams};
use crate::staircase::Filling;

/// Energies within this window of the best are recomputed from scratch.
const CANDIDATE_WINDOW: f64 = 1e-9;
/// Exact-degeneracy tolerance for reported minima.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Stopping width of the μ bisection.
pub const BISECT_TOL: f64 = 1e-6;
const MAX_STORED_TIES: usize = 1 << 16;
const CHUNK: u64 = 1 << 14;

/// Largest ring enumerated exhaustively for a given truncation.
pub fn max_ring_len(n_max: u32) -> usize {
    match n_max {
        1 => 28,
        2 => 16,
        _ => 0,
    }
}

/// Diagonal part of the lattice Hamiltonian on a ring of `len` sites.
#[derive(Clone, Debug)]
pub struct RingModel {
    len: usize,
    n_max: u8,
    params: ModelParams,
    site: Vec<f64>,
    /// `pair[(a * (n_max + 1) + b) * stride + d]`, zero when `a` or `b` is 0.
    pair: Vec<f64>,
    stride: usize,
    distance: Vec<usize>,
}

impl RingModel {
    pub fn new(len: usize, params: &ModelParams) -> Result<Self> {
        params.validate()?;
        if len < 2 {
            return Err(invalid("L", format!("ring needs at least 2 sites, got {len}")));
        }
        let n_max = params.n_max as u8;
        let levels = usize::from(n_max) + 1;
        let stride = len / 2 + 1;
        let mut pair = vec![0.0; levels * levels * stride];
        for a in 1..levels {
            for b in 1..levels {
                for d in 1..stride {
                    pair[(a * levels + b) * stride + d] =
                        effective_interaction(a as u32, b as u32, d as u32, params)?;
                }
            }
        }
        let distance = (0..len * len)
            .map(|ij| {
                let (i, j) = (ij / len, ij % len);
                let d = i.abs_diff(j);
                d.min(len - d)
            })
            .collect();
        let mut ring = Self {
            len,
            n_max,
            params: *params,
            site: Vec::new(),
            pair,
            stride,
            distance,
        };
        ring.set_mu(params.mu);
        Ok(ring)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n_max(&self) -> u8 {
        self.n_max
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn set_mu(&mut self, mu: f64) {
        self.params.mu = mu;
        self.site = (0..=u32::from(self.n_max))
            .map(|n| eigen_energy(n, Branch::Minus, &self.params))
            .collect();
    }

    pub fn site_energy(&self, n: u8) -> f64 {
        self.site[usize::from(n)]
    }

    #[inline]
    fn pair_energy(&self, a: u8, b: u8, i: usize, j: usize) -> f64 {
        let levels = usize::from(self.n_max) + 1;
        let d = self.distance[i * self.len + j];
        self.pair[(usize::from(a) * levels + usize::from(b)) * self.stride + d]
    }

    /// Grand-canonical energy computed from scratch.
    pub fn energy(&self, occ: &[u8]) -> f64 {
        debug_assert_eq!(occ.len(), self.len);
        let mut e = 0.0;
        for i in 0..self.len {
            e += self.site_energy(occ[i]);
            if occ[i] == 0 {
                continue;
            }
            for j in i + 1..self.len {
                if occ[j] != 0 {
                    e += self.pair_energy(occ[i], occ[j], i, j);
                }
            }
        }
        e
    }

    /// Energy change when site `s` goes from `occ[s]` to `to`.
    fn delta(&self, occ: &[u8], s: usize, to: u8) -> f64 {
        let from = occ[s];
        let mut d = self.site_energy(to) - self.site_energy(from);
        for (j, &n) in occ.iter().enumerate() {
            if j != s && n != 0 {
                d += self.pair_energy(to, n, s, j) - self.pair_energy(from, n, s, j);
            }
        }
        d
    }

    fn state_count(&self) -> u64 {
        (u64::from(self.n_max) + 1).pow(self.len as u32)
    }

    fn check_enumerable(&self) -> Result<()> {
        let limit = max_ring_len(u32::from(self.n_max));
        if self.len > limit {
            return Err(Error::TooLarge {
                what: format!(
                    "exhaustive enumeration of L = {} with n_max = {}",
                    self.len, self.n_max
                ),
                limit: limit as u64,
            });
        }
        Ok(())
    }

    /// Visits every configuration with its (incrementally updated) energy.
    ///
    /// Configurations are split into fixed index ranges that are enumerated
    /// independently; each range starts from a from-scratch energy.
    fn enumerate<A, M>(&self, make: M) -> Result<A>
    where
        A: Accumulator,
        M: Fn() -> A + Sync + Send,
    {
        self.check_enumerable()?;
        let total = self.state_count();
        let chunks = total.div_ceil(CHUNK);
        let base = u64::from(self.n_max) + 1;
        Ok((0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = make();
                let start = c * CHUNK;
                let end = (start + CHUNK).min(total);
                let mut occ = vec![0u8; self.len];
                let mut idx = start;
                for slot in occ.iter_mut() {
                    *slot = (idx % base) as u8;
                    idx /= base;
                }
                let mut e = self.energy(&occ);
                acc.visit(&occ, e);
                for _ in start + 1..end {
                    // Odometer step: roll over saturated digits, bump the next.
                    let mut s = 0;
                    while occ[s] == self.n_max {
                        e += self.delta(&occ, s, 0);
                        occ[s] = 0;
                        s += 1;
                    }
                    e += self.delta(&occ, s, occ[s] + 1);
                    occ[s] += 1;
                    acc.visit(&occ, e);
                }
                acc
            })
            .reduce(&make, A::merge))
    }
}

trait Accumulator: Send + Sized {
    fn visit(&mut self, occ: &[u8], energy: f64);
    fn merge(self, other: Self) -> Self;
}

#[derive(Default)]
struct MinTracker {
    best: f64,
    candidates: Vec<Vec<u8>>,
    energies: Vec<f64>,
    truncated: bool,
}

impl MinTracker {
    fn new() -> Self {
        Self {
            best: f64::INFINITY,
            ..Default::default()
        }
    }

    fn prune(&mut self) {
        let cut = self.best + CANDIDATE_WINDOW;
        let mut k = 0;
        while k < self.energies.len() {
            if self.energies[k] > cut {
                self.energies.swap_remove(k);
                self.candidates.swap_remove(k);
            } else {
                k += 1;
            }
        }
    }

    fn push(&mut self, occ: Vec<u8>, energy: f64) {
        if energy > self.best + CANDIDATE_WINDOW {
            return;
        }
        if energy < self.best {
            self.best = energy;
            self.prune();
        }
        if self.candidates.len() >= MAX_STORED_TIES {
            self.truncated = true;
            return;
        }
        self.candidates.push(occ);
        self.energies.push(energy);
    }
}

impl Accumulator for MinTracker {
    fn visit(&mut self, occ: &[u8], energy: f64) {
        if energy <= self.best + CANDIDATE_WINDOW {
            self.push(occ.to_vec(), energy);
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.truncated |= other.truncated;
        for (occ, e) in other.candidates.into_iter().zip(other.energies) {
            self.push(occ, e);
        }
        self
    }
}

/// Per total-excitation-number minimum energy and its minimiser.
struct SectorTracker {
    best: Vec<(f64, Vec<u8>)>,
}

impl Accumulator for SectorTracker {
    fn visit(&mut self, occ: &[u8], energy: f64) {
        let n: usize = occ.iter().map(|&x| usize::from(x)).sum();
        if energy < self.best[n].0 {
            self.best[n] = (energy, occ.to_vec());
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (mine, theirs) in self.best.iter_mut().zip(other.best) {
            // Lexicographic tie-break keeps the reduction order-independent.
            if theirs.0 < mine.0 || (theirs.0 == mine.0 && theirs.1 < mine.1) {
                *mine = theirs;
            }
        }
        self
    }
}

/// An occupation vector on the ring and its grand-canonical energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeConfig {
    pub occupations: Vec<u8>,
    pub energy: f64,
}

impl LatticeConfig {
    pub fn len(&self) -> usize {
        self.occupations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupations.is_empty()
    }

    /// Fraction of sites holding any excitation.
    pub fn filling(&self) -> f64 {
        occupied_fraction(&self.occupations)
    }

    pub fn excitation_density(&self) -> f64 {
        excitation_density(&self.occupations)
    }
}

fn occupied_fraction(occ: &[u8]) -> f64 {
    occ.iter().filter(|&&n| n > 0).count() as f64 / occ.len() as f64
}

fn excitation_density(occ: &[u8]) -> f64 {
    occ.iter().map(|&n| f64::from(n)).sum::<f64>() / occ.len() as f64
}

pub fn rotate(occ: &[u8], k: usize) -> Vec<u8> {
    let l = occ.len();
    (0..l).map(|i| occ[(i + k) % l]).collect()
}

/// Lexicographically smallest rotation.
pub fn canonical_rotation(occ: &[u8]) -> Vec<u8> {
    (0..occ.len())
        .map(|k| rotate(occ, k))
        .min()
        .unwrap_or_default()
}

/// Most uniform arrangement of a `p/q` crystal on `len` sites, with each
/// occupied site holding `level` excitations.
pub fn ideal_crystal(filling: Filling, len: usize, level: u8) -> Result<Vec<u8>> {
    let (p, q) = (filling.p() as usize, filling.q() as usize);
    if !len.is_multiple_of(q) {
        return Err(invalid("L", format!("{len} is not a multiple of q = {q}")));
    }
    Ok((0..len)
        .map(|i| {
            if (i + 1) * p / q > i * p / q {
                level
            } else {
                0
            }
        })
        .collect())
}

/// Global minimum of the classical (zero-hopping) energy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassicalGroundState {
    pub len: usize,
    pub n_max: u8,
    pub energy: f64,
    /// Distinct minimisers up to rotation, each in canonical form, sorted.
    pub configs: Vec<LatticeConfig>,
    /// Number of minimising configurations, rotations counted separately.
    pub degeneracy: usize,
    /// Shared occupied-site fraction, `None` when the minimisers disagree.
    pub filling: Option<f64>,
    pub excitation_density: Option<f64>,
    /// More near-degenerate states existed than were stored.
    pub truncated: bool,
}

fn shared(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut out: Option<f64> = None;
    for v in values {
        match out {
            None => out = Some(v),
            Some(x) if x == v => {}
            Some(_) => return None,
        }
    }
    out
}

/// Exhaustive minimum over `{0, …, n_max}^L` at the chemical potential in
/// `params`.
pub fn classical_ground_state(len: usize, params: &ModelParams) -> Result<ClassicalGroundState> {
    let ring = RingModel::new(len, params)?;
    classical_ground_state_on(&ring)
}

pub fn classical_ground_state_on(ring: &RingModel) -> Result<ClassicalGroundState> {
    let tracker = ring.enumerate(MinTracker::new)?;
    let exact: Vec<(Vec<u8>, f64)> = tracker
        .candidates
        .into_iter()
        .map(|occ| {
            let e = ring.energy(&occ);
            (occ, e)
        })
        .collect();
    let energy = exact.iter().map(|(_, e)| *e).fold(f64::INFINITY, f64::min);
    let winners: Vec<Vec<u8>> = exact
        .into_iter()
        .filter(|(_, e)| *e <= energy + DEGENERACY_TOL)
        .map(|(occ, _)| occ)
        .collect();
    let degeneracy = winners.len();
    let mut canon: Vec<Vec<u8>> = winners.iter().map(|o| canonical_rotation(o)).collect();
    canon.sort();
    canon.dedup();
    let configs: Vec<LatticeConfig> = canon
        .into_iter()
        .map(|occ| LatticeConfig {
            energy: ring.energy(&occ),
            occupations: occ,
        })
        .collect();
    Ok(ClassicalGroundState {
        len: ring.len(),
        n_max: ring.n_max(),
        energy,
        filling: shared(configs.iter().map(LatticeConfig::filling)),
        excitation_density: shared(configs.iter().map(LatticeConfig::excitation_density)),
        configs,
        degeneracy,
        truncated: tracker.truncated,
    })
}

/// Minimum energy at `μ = 0` in every total-excitation sector of a ring.
///
/// Since `E_n(μ) = E_n(0) - nμ`, the grand-canonical energy of sector `N` at
/// any μ is `minimum[N] - μ N`, so one enumeration answers every μ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorMinima {
    pub len: usize,
    pub minimum: Vec<f64>,
    pub minimiser: Vec<Vec<u8>>,
}

impl SectorMinima {
    pub fn compute(len: usize, params: &ModelParams) -> Result<Self> {
        let ring = RingModel::new(len, &params.with_mu(0.0))?;
        let sectors = len * usize::from(ring.n_max()) + 1;
        let tracker = ring.enumerate(|| SectorTracker {
            best: vec![(f64::INFINITY, Vec::new()); sectors],
        })?;
        let (minimum, minimiser) = tracker
            .best
            .into_iter()
            .map(|(_, occ)| (ring.energy(&occ), occ))
            .unzip();
        Ok(Self {
            len,
            minimum,
            minimiser,
        })
    }

    /// Ground-state excitation number at `mu`; the smallest on exact ties.
    pub fn ground_sector(&self, mu: f64) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (n, &m) in self.minimum.iter().enumerate() {
            let e = m - mu * n as f64;
            if e < best.0 {
                best = (e, n);
            }
        }
        best.1
    }

    /// μ brackets outside which the ground state is empty / saturated.
    fn bracket(&self) -> (f64, f64) {
        let m = &self.minimum;
        let top = m.len() - 1;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for a in 0..=top {
            for b in a + 1..=top {
                let slope = (m[b] - m[a]) / (b - a) as f64;
                lo = lo.min(slope);
                hi = hi.max(slope);
            }
        }
        (lo - 1.0, hi + 1.0)
    }

    /// Smallest μ (to within [`BISECT_TOL`]) at which the ground state holds
    /// at least `n` excitations.
    pub fn threshold(&self, n: usize) -> f64 {
        let (mut lo, mut hi) = self.bracket();
        if n == 0 {
            return f64::NEG_INFINITY;
        }
        while hi - lo > BISECT_TOL {
            let mid = 0.5 * (lo + hi);
            if self.ground_sector(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Empirical stability window of `filling` on a ring of `len` sites, found by
/// bisecting the ground-state filling in μ.
///
/// An empty window comes back with `mu_high <= mu_low` (to within the
/// bisection tolerance).
pub fn boundary_bisect(filling: Filling, params: &ModelParams, len: usize) -> Result<(f64, f64)> {
    let q = filling.q() as usize;
    if !len.is_multiple_of(q) {
        return Err(invalid("L", format!("{len} is not a multiple of q = {q}")));
    }
    let sectors = SectorMinima::compute(len, params)?;
    Ok(window_from_sectors(&sectors, filling))
}

pub fn window_from_sectors(sectors: &SectorMinima, filling: Filling) -> (f64, f64) {
    let n0 = sectors.len * filling.p() as usize / filling.q() as usize;
    let low = sectors.threshold(n0);
    let high = if n0 + 1 < sectors.minimum.len() {
        sectors.threshold(n0 + 1)
    } else {
        f64::INFINITY
    };
    (low, high)
}

/// Serializable oracle outcome consumed by the validation report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleRecord {
    #[serde(rename = "L")]
    pub len: usize,
    pub n_max: u32,
    pub params: ModelParams,
    pub ground_energy: f64,
    pub filling: Option<f64>,
    pub config: Option<Vec<u8>>,
    pub degeneracy: usize,
}

impl OracleRecord {
    pub fn from_classical(params: &ModelParams, gs: &ClassicalGroundState) -> Self {
        Self {
            len: gs.len,
            n_max: params.n_max,
            params: *params,
            ground_energy: gs.energy,
            filling: gs.filling,
            config: gs.configs.first().map(|c| c.occupations.clone()),
            degeneracy: gs.degeneracy,
        }
    }

    pub fn from_spectrum(params: &ModelParams, s: &SpectrumResult) -> Self {
        Self {
            len: s.len,
            n_max: params.n_max,
            params: *params,
            ground_energy: s.ground_energy,
            filling: Some(s.filling),
            config: Some(s.dominant_config.clone()),
            degeneracy: s.degeneracy,
        }
    }
}
