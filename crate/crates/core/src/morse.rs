//! Discrete vector fields on the cubical complex and Morse cancellation.
//!
//! A field is a partial matching of cells with their faces of one lower
//! dimension. A V-path of dimension `p` runs `t0, s0, t1, s1, ..., t_{r+1}`
//! where each `(t_i, s_i)` is matched and `t_{i+1}` is a face of `s_i` other
//! than `t_i`. The single-cell path `(t0)` is admitted, so a critical cell can
//! be cancelled directly against a critical coface.
//!
//! On a 2D grid both kinds of V-path are chains without branching once their
//! last cell is fixed: dimension-0 paths follow vertex/edge matches forward
//! from each endpoint of the edge, and dimension-1 paths are recovered by
//! walking from the target edge's cofaces up the square/edge matches. Hence
//! there are at most two V-paths between any pair of critical cells.

use std::collections::VecDeque;
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::CubicalComplex;
use crate::persistence::{PersistenceDiagram, PersistencePair};

#[derive(Debug, Error, PartialEq)]
pub enum MorseError {
    #[error("cell {0} is not critical")]
    NotCritical(usize),
    #[error("cells {sigma} (dim {sigma_dim}) and {tau} (dim {tau_dim}) cannot be cancelled: dimensions must differ by one")]
    WrongDimensions { sigma: usize, sigma_dim: u8, tau: usize, tau_dim: u8 },
    #[error("cell {cell} is outside the complex ({len} cells)")]
    OutOfRange { cell: usize, len: usize },
    #[error("simplification must start from the trivial vector field")]
    NotTrivial,
    #[error("persistence cut-off must be positive and finite, got {0}")]
    BadDelta(f64),
    #[error("diagram covers {diagram} cells but the field has {field}")]
    DiagramMismatch { diagram: usize, field: usize },
    #[error("V-path from cell {0} exceeds the cell count; the field is not acyclic")]
    Cyclic(usize),
}

/// Matching state of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Match {
    Critical,
    /// Paired with this coface.
    Up(usize),
    /// Paired with this face.
    Down(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPath {
    cells: Vec<usize>,
}

impl VPath {
    /// Alternating `p` and `p + 1` cells; the first is a face of the source
    /// cell and the last is the target.
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    /// Number of matched pairs crossed.
    pub fn len(&self) -> usize {
        self.cells.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.cells.len() == 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cancellation {
    Success,
    /// Zero or several V-paths connect the pair.
    NotCancellable { paths: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteVectorField {
    complex: CubicalComplex,
    state: Vec<Match>,
    cancellations: usize,
    skipped: usize,
}

impl DiscreteVectorField {
    /// Every cell critical.
    pub fn trivial(complex: &CubicalComplex) -> Self {
        Self {
            complex: complex.clone(),
            state: vec![Match::Critical; complex.num_cells()],
            cancellations: 0,
            skipped: 0,
        }
    }

    pub fn complex(&self) -> &CubicalComplex {
        &self.complex
    }

    pub fn state(&self, cell: usize) -> Match {
        self.state[cell]
    }

    pub fn is_critical(&self, cell: usize) -> bool {
        self.state[cell] == Match::Critical
    }

    pub fn is_trivial(&self) -> bool {
        self.state.iter().all(|m| *m == Match::Critical)
    }

    pub fn cancellations(&self) -> usize {
        self.cancellations
    }

    pub fn skipped(&self) -> usize {
        self.skipped
    }

    /// Critical cells grouped by dimension, ascending index within each.
    pub fn critical_cells(&self) -> [Vec<usize>; 3] {
        let mut out: [Vec<usize>; 3] = Default::default();
        for (cell, m) in self.state.iter().enumerate() {
            if *m == Match::Critical {
                out[self.complex.dim(cell) as usize].push(cell);
            }
        }
        out
    }

    pub fn num_critical(&self) -> usize {
        self.state.iter().filter(|m| **m == Match::Critical).count()
    }

    fn check_cell(&self, cell: usize) -> Result<(), MorseError> {
        if cell >= self.state.len() {
            return Err(MorseError::OutOfRange { cell, len: self.state.len() });
        }
        Ok(())
    }

    fn check_pair(&self, sigma: usize, tau: usize) -> Result<(), MorseError> {
        self.check_cell(sigma)?;
        self.check_cell(tau)?;
        let (sd, td) = (self.complex.dim(sigma), self.complex.dim(tau));
        if sd + 1 != td {
            return Err(MorseError::WrongDimensions { sigma, sigma_dim: sd, tau, tau_dim: td });
        }
        for cell in [sigma, tau] {
            if !self.is_critical(cell) {
                return Err(MorseError::NotCritical(cell));
            }
        }
        Ok(())
    }

    /// All V-paths from a face of the critical cell `from` to the critical
    /// cell `to`, one dimension lower.
    pub fn find_vpaths(&self, from: usize, to: usize) -> Result<Vec<VPath>, MorseError> {
        self.check_pair(to, from)?;
        let limit = self.state.len();
        let mut paths = Vec::new();
        match self.complex.dim(to) {
            0 => {
                for &start in &self.complex.face_indices(from) {
                    let mut cells = vec![start];
                    let mut cur = start;
                    loop {
                        if cur == to {
                            paths.push(VPath { cells });
                            break;
                        }
                        let Match::Up(edge) = self.state[cur] else {
                            break;
                        };
                        cur = self.complex.other_endpoint(edge, cur);
                        cells.push(edge);
                        cells.push(cur);
                        if cells.len() > limit {
                            return Err(MorseError::Cyclic(start));
                        }
                    }
                }
            }
            _ => {
                // Walk from each square next to `to` towards the root of its
                // matching tree; a path exists iff the walk reaches `from`.
                for &start in &self.complex.coface_indices(to) {
                    let mut walk = vec![start];
                    let mut cur = start;
                    let reached = loop {
                        if cur == from {
                            break true;
                        }
                        let Match::Down(edge) = self.state[cur] else {
                            break false;
                        };
                        let Some(parent) = self.complex.other_coface(edge, cur) else {
                            break false;
                        };
                        walk.push(edge);
                        walk.push(parent);
                        cur = parent;
                        if walk.len() > limit {
                            return Err(MorseError::Cyclic(start));
                        }
                    };
                    if reached {
                        walk.pop();
                        walk.reverse();
                        walk.push(to);
                        paths.push(VPath { cells: walk });
                    }
                }
            }
        }
        Ok(paths)
    }

    /// Cancels the critical pair `(sigma, tau)` if exactly one V-path joins a
    /// face of `tau` to `sigma`, reversing the matches along it.
    pub fn cancel_pair(&mut self, sigma: usize, tau: usize) -> Result<Cancellation, MorseError> {
        let mut paths = self.find_vpaths(tau, sigma)?;
        if paths.len() != 1 {
            self.skipped += 1;
            return Ok(Cancellation::NotCancellable { paths: paths.len() });
        }
        let cells = paths.pop().expect("one path").cells;
        self.state[cells[0]] = Match::Up(tau);
        self.state[tau] = Match::Down(cells[0]);
        for step in cells[1..].chunks_exact(2) {
            let (upper, lower) = (step[0], step[1]);
            self.state[lower] = Match::Up(upper);
            self.state[upper] = Match::Down(lower);
        }
        self.cancellations += 1;
        Ok(Cancellation::Success)
    }

    /// Checks that the matching is symmetric and only pairs faces with
    /// cofaces one dimension up.
    pub fn check_matching(&self) -> Result<(), String> {
        for (cell, m) in self.state.iter().enumerate() {
            match *m {
                Match::Critical => {}
                Match::Up(coface) => {
                    if self.state.get(coface) != Some(&Match::Down(cell)) {
                        return Err(format!("{cell} -> {coface} is not mirrored"));
                    }
                    if !self.complex.face_indices(coface).contains(&cell) {
                        return Err(format!("{cell} is not a face of {coface}"));
                    }
                }
                Match::Down(face) => {
                    if self.state.get(face) != Some(&Match::Up(cell)) {
                        return Err(format!("{cell} <- {face} is not mirrored"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Whether the modified Hasse diagram (matched face->coface arrows
    /// reversed) has no directed cycle, by Kahn's topological sort.
    pub fn is_acyclic(&self) -> bool {
        let n = self.state.len();
        let mut indegree = vec![0u32; n];
        let arrows = |cell: usize, out: &mut Vec<usize>| {
            out.clear();
            // coface -> face for unmatched incidences
            for &face in &self.complex.face_indices(cell) {
                if self.state[face] != Match::Up(cell) {
                    out.push(face);
                }
            }
            // face -> coface for the matched incidence
            if let Match::Up(coface) = self.state[cell] {
                out.push(coface);
            }
        };
        let mut buf = Vec::with_capacity(5);
        for cell in 0..n {
            arrows(cell, &mut buf);
            for &t in &buf {
                indegree[t] += 1;
            }
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&c| indegree[c] == 0).collect();
        let mut seen = 0;
        while let Some(cell) = queue.pop_front() {
            seen += 1;
            arrows(cell, &mut buf);
            for &t in &buf {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    queue.push_back(t);
                }
            }
        }
        seen == n
    }

    /// One line per cell: `index -> partner` or `index -> CRITICAL`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (cell, m) in self.state.iter().enumerate() {
            let _ = match m {
                Match::Critical => writeln!(out, "{cell} -> CRITICAL"),
                Match::Up(p) | Match::Down(p) => writeln!(out, "{cell} -> {p}"),
            };
        }
        out
    }
}

/// Finite pairs with persistence below `delta`, in increasing persistence,
/// ties broken by ascending death cell.
pub fn cancellation_schedule(diagram: &PersistenceDiagram, delta: f64) -> Vec<PersistencePair> {
    let mut pairs: Vec<PersistencePair> =
        diagram.finite_pairs().filter(|p| p.persistence() < delta).copied().collect();
    pairs.sort_by(|a, b| {
        a.persistence().total_cmp(&b.persistence()).then_with(|| a.death.cmp(&b.death))
    });
    pairs
}

/// Persistence-guided simplification: one pass over the schedule, skipping
/// pairs that are not cancellable.
pub fn simplify(
    mut field: DiscreteVectorField,
    diagram: &PersistenceDiagram,
    delta: f64,
) -> Result<DiscreteVectorField, MorseError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(MorseError::BadDelta(delta));
    }
    if !field.is_trivial() {
        return Err(MorseError::NotTrivial);
    }
    if diagram.num_cells() != field.state.len() {
        return Err(MorseError::DiagramMismatch { diagram: diagram.num_cells(), field: field.state.len() });
    }
    for pair in cancellation_schedule(diagram, delta) {
        let death = pair.death.expect("schedule holds finite pairs");
        field.cancel_pair(pair.birth, death)?;
    }
    Ok(field)
}
