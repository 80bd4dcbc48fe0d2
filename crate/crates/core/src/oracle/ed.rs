//! Dense exact diagonalization of the projected chain on a small ring.
//!
//! The Hamiltonian conserves the total excitation number, so each sector is
//! built and solved on its own; the spectrum of the full product basis is
//! the union of the sector spectra.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::RingModel;
use crate::error::{invalid, Error, Result};
use crate::model::{hopping_overlap, ModelParams, PolaritonLevel};

/// Largest product-basis dimension accepted for a dense solve.
pub const ED_MAX_DIMENSION: u64 = 20_000;
/// Eigenvalues this close to the ground energy count as degenerate.
const ED_DEGENERACY_TOL: f64 = 1e-10;

/// Eigen-decomposition of one total-excitation sector.
#[derive(Clone, Debug)]
pub struct SectorSpectrum {
    pub excitations: usize,
    pub basis: Vec<Vec<u8>>,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Normalised ground vector in `basis` order.
    pub ground_vector: Vec<f64>,
}

impl SectorSpectrum {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

/// Ground-state summary of the full ring.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub len: usize,
    pub n_max: u32,
    /// `(n_max + 1)^L`.
    pub dimension: u64,
    pub ground_energy: f64,
    pub ground_sector: usize,
    /// Excitations per site in the ground state.
    pub filling: f64,
    /// Photons per site, `⟨Σ_i (n_i − sin²θ_{n_i})⟩ / L`.
    pub photon_density: f64,
    /// Eigenvalues within tolerance of the ground energy, all sectors.
    pub degeneracy: usize,
    /// Basis state with the largest ground-state weight.
    pub dominant_config: Vec<u8>,
}

fn check_dimension(len: usize, n_max: u32) -> Result<u64> {
    let dim = (u64::from(n_max) + 1)
        .checked_pow(len as u32)
        .filter(|&d| d <= ED_MAX_DIMENSION)
        .ok_or_else(|| Error::TooLarge {
            what: format!("dense diagonalization of L = {len} with n_max = {n_max}"),
            limit: ED_MAX_DIMENSION,
        })?;
    Ok(dim)
}

fn sector_basis(len: usize, n_max: u8, excitations: usize) -> Vec<Vec<u8>> {
    let base = u64::from(n_max) + 1;
    let total = base.pow(len as u32);
    (0..total)
        .map(|mut idx| {
            (0..len)
                .map(|_| {
                    let d = (idx % base) as u8;
                    idx /= base;
                    d
                })
                .collect::<Vec<u8>>()
        })
        .filter(|occ| occ.iter().map(|&n| usize::from(n)).sum::<usize>() == excitations)
        .collect()
}

/// Nearest-neighbour bonds of the ring, each listed once.
fn bonds(len: usize) -> Vec<(usize, usize)> {
    match len {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..len).map(|i| (i, (i + 1) % len)).collect(),
    }
}

fn sector_matrix(ring: &RingModel, basis: &[Vec<u8>]) -> Result<DMatrix<f64>> {
    let p = ring.params();
    let beta: Vec<f64> = (0..u32::from(ring.n_max()))
        .map(|n| hopping_overlap(n, n + 1, p.delta, p.g))
        .collect::<Result<_>>()?;
    let mut index = std::collections::HashMap::with_capacity(basis.len());
    for (k, occ) in basis.iter().enumerate() {
        index.insert(occ.as_slice(), k);
    }
    let dim = basis.len();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for (col, occ) in basis.iter().enumerate() {
        h[(col, col)] = ring.energy(occ);
        if p.t == 0.0 {
            continue;
        }
        for (i, j) in bonds(ring.len()) {
            let (a, b) = (occ[i], occ[j]);
            // |m⟩_i|n⟩_j ↔ |n⟩_i|m⟩_j with m = n + 1.
            if a.abs_diff(b) != 1 {
                continue;
            }
            let n = a.min(b);
            let mut to = occ.clone();
            to.swap(i, j);
            let row = index[to.as_slice()];
            h[(row, col)] += -p.t * beta[usize::from(n)];
        }
    }
    let asym = (&h - h.transpose()).amax();
    assert!(asym == 0.0, "projected Hamiltonian lost symmetry: {asym}");
    Ok(h)
}

/// Full spectrum of the sector with `excitations` total quanta.
pub fn sector_spectrum(len: usize, params: &ModelParams, excitations: usize) -> Result<SectorSpectrum> {
    check_dimension(len, params.n_max)?;
    let ring = RingModel::new(len, params)?;
    sector_spectrum_on(&ring, excitations)
}

fn sector_spectrum_on(ring: &RingModel, excitations: usize) -> Result<SectorSpectrum> {
    let top = ring.len() * usize::from(ring.n_max());
    if excitations > top {
        return Err(invalid(
            "excitations",
            format!("at most {top} fit on this ring, got {excitations}"),
        ));
    }
    let basis = sector_basis(ring.len(), ring.n_max(), excitations);
    let h = sector_matrix(ring, &basis)?;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut ground_vector: Vec<f64> = eig.eigenvectors.column(order[0]).iter().copied().collect();
    // Fix the overall sign so the output does not depend on the solver.
    if let Some(&lead) = ground_vector
        .iter()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
    {
        if lead < 0.0 {
            ground_vector.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(SectorSpectrum {
        excitations,
        basis,
        energies,
        ground_vector,
    })
}

/// Ground state of the projected Hamiltonian with hopping on a ring of `len`
/// sites.
pub fn exact_diagonalize(len: usize, params: &ModelParams) -> Result<SpectrumResult> {
    let dimension = check_dimension(len, params.n_max)?;
    let ring = RingModel::new(len, params)?;
    let sectors: Vec<SectorSpectrum> = (0..=len * params.n_max as usize)
        .map(|n| sector_spectrum_on(&ring, n))
        .collect::<Result<_>>()?;
    let ground = sectors
        .iter()
        .min_by(|a, b| a.ground_energy().total_cmp(&b.ground_energy()))
        .expect("at least the empty sector exists");
    let e0 = ground.ground_energy();
    let degeneracy = sectors
        .iter()
        .flat_map(|s| s.energies.iter())
        .filter(|&&e| e <= e0 + ED_DEGENERACY_TOL)
        .count();
    let photon_weight: Vec<f64> = (0..=params.n_max)
        .map(|n| PolaritonLevel::new(n, params).map(|l| l.photon_weight_minus))
        .collect::<Result<_>>()?;
    let photons: f64 = ground
        .basis
        .iter()
        .zip(&ground.ground_vector)
        .map(|(occ, amp)| {
            amp * amp
                * occ
                    .iter()
                    .map(|&n| photon_weight[usize::from(n)])
                    .sum::<f64>()
        })
        .sum();
    let dominant = ground
        .ground_vector
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (k, a)| {
            if a.abs() > best.1 {
                (k, a.abs())
            } else {
                best
            }
        })
        .0;
    Ok(SpectrumResult {
        len,
        n_max: params.n_max,
        dimension,
        ground_energy: e0,
        ground_sector: ground.excitations,
        filling: ground.excitations as f64 / len as f64,
        photon_density: photons / len as f64,
        degeneracy,
        dominant_config: ground.basis[dominant].clone(),
    })
}
