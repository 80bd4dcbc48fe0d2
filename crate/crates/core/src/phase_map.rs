//! Rectangular phase maps and their CSV form.

use std::fmt;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{invalid, Result};

/// Evenly spaced samples `min, ..., max` (both ends included).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn check(&self, name: &'static str) -> Result<()> {
        if self.points < 2 {
            return Err(invalid(name, "axis needs at least 2 points"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max <= self.min {
            return Err(invalid(
                name,
                format!("axis range [{}, {}] is empty", self.min, self.max),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points.max(2) - 1;
        (0..self.points)
            .map(|i| {
                if i == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

/// Phase vocabulary shared by the staircase, melting and resonant maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MapLabel {
    Vacuum,
    /// Commensurate `|1̃⟩` crystal with `ρ < 1` (photon solid).
    Solid,
    /// Every cavity excited alike, or a superfluid-like state without
    /// repulsion.
    Uniform,
    /// Between resolved plateaus, or exactly on a window edge.
    Transition,
    /// Photon-floating solid: crystals melted by mobile defects.
    Floating,
    /// Photon-frozen solid: `|0⟩/|2̃⟩` crystal that hopping cannot move.
    Frozen,
    /// Lattice uniformly filled with `|2̃⟩`.
    Uniform2,
    /// `|1̃⟩` staircase region of the resonant classifier.
    PhotonSolid,
    /// Uniform `|1̃⟩` filling of the resonant classifier.
    Uniform1,
}

impl MapLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            MapLabel::Vacuum => "vacuum",
            MapLabel::Solid => "solid",
            MapLabel::Uniform => "uniform",
            MapLabel::Transition => "transition",
            MapLabel::Floating => "PF",
            MapLabel::Frozen => "FS",
            MapLabel::Uniform2 => "uniform-2",
            MapLabel::PhotonSolid => "PS",
            MapLabel::Uniform1 => "uniform-1",
        }
    }
}

impl fmt::Display for MapLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub label: MapLabel,
    /// `(p, q)` when the filling is known; vacuum is `(0, 1)`.
    pub filling: Option<(u32, u32)>,
}

impl Cell {
    pub fn new(label: MapLabel, filling: Option<(u32, u32)>) -> Self {
        Self { label, filling }
    }
}

/// Grid of cells; `rows[j][i]` sits at `(mu_axis[i], y_axis[j])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseMap {
    pub y_name: &'static str,
    pub mu_axis: Axis,
    pub y_axis: Axis,
    pub rows: Vec<Vec<Cell>>,
}

/// Twelve significant digits in scientific notation.
pub fn format_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

impl PhaseMap {
    pub fn new(y_name: &'static str, mu_axis: Axis, y_axis: Axis, rows: Vec<Vec<Cell>>) -> Self {
        Self {
            y_name,
            mu_axis,
            y_axis,
            rows,
        }
    }

    pub fn header(&self) -> String {
        format!("mu,{},p,q,rho,label", self.y_name)
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, &Cell)> + '_ {
        let mus = self.mu_axis.values();
        let ys = self.y_axis.values();
        self.rows.iter().zip(ys).flat_map(move |(row, y)| {
            row.iter()
                .zip(mus.clone())
                .map(move |(cell, mu)| (mu, y, cell))
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.header())?;
        for (mu, y, cell) in self.cells() {
            let (p, q, rho) = match cell.filling {
                Some((p, q)) => (
                    p.to_string(),
                    q.to_string(),
                    format_sig12(f64::from(p) / f64::from(q)),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            writeln!(
                out,
                "{},{},{},{},{},{}",
                format_sig12(mu),
                format_sig12(y),
                p,
                q,
                rho,
                cell.label
            )?;
        }
        Ok(())
    }

    pub fn count(&self, label: MapLabel) -> usize {
        self.rows.iter().flatten().filter(|c| c.label == label).count()
    }
}
