//! Comparison of a reconstruction against the ground-truth graph.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::PlanarGraph;
use crate::extraction::{graph_stats, ReconstructedGraph};
use crate::geom::{sample_polyline, Point};

#[derive(Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("Hausdorff distance is undefined for an empty polyline set")]
    EmptySet,
    #[error("sampling resolution must be positive and finite, got {0}")]
    BadResolution(f64),
    #[error("omega must be positive and finite, got {0}")]
    BadOmega(f64),
    #[error("ground-truth graph must be connected, it has {0} components")]
    Disconnected(usize),
}

fn samples<'a>(lines: impl IntoIterator<Item = &'a [Point]>, resolution: f64) -> Vec<Point> {
    let mut out = Vec::new();
    for line in lines {
        sample_polyline(line, resolution, &mut out);
    }
    out
}

/// max over `from` of the distance to the nearest point of `to`.
fn directed(from: &[Point], to: &[Point]) -> f64 {
    let mut worst_sq = 0.0f64;
    for &a in from {
        let mut best_sq = f64::INFINITY;
        for &b in to {
            let d = a.dist_sq(b);
            if d < best_sq {
                best_sq = d;
                // cannot raise the maximum any more
                if best_sq <= worst_sq {
                    break;
                }
            }
        }
        worst_sq = worst_sq.max(best_sq);
    }
    worst_sq.sqrt()
}

/// Symmetric Hausdorff distance between two polyline sets, each sampled at
/// arc-length steps of at most `resolution`. The sampled value is within
/// `resolution / 2` of the exact one.
pub fn hausdorff_distance<'a, 'b>(
    a: impl IntoIterator<Item = &'a [Point]>,
    b: impl IntoIterator<Item = &'b [Point]>,
    resolution: f64,
) -> Result<f64, VerifyError> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(VerifyError::BadResolution(resolution));
    }
    let (sa, sb) = (samples(a, resolution), samples(b, resolution));
    if sa.is_empty() || sb.is_empty() {
        return Err(VerifyError::EmptySet);
    }
    Ok(directed(&sa, &sb).max(directed(&sb, &sa)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMatch {
    pub graph_vertex: usize,
    pub node: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub b0_truth: usize,
    pub b1_truth: usize,
    pub b0_recon: usize,
    pub b1_recon: usize,
    /// Infinite when the reconstruction is empty.
    #[serde(with = "crate::io::inf_float")]
    pub hausdorff: f64,
    pub omega: f64,
    pub resolution: f64,
    pub node_match: Vec<NodeMatch>,
    pub pass: bool,
}

impl TheoremReport {
    pub fn topology_ok(&self) -> bool {
        self.b0_truth == 1 && self.b0_recon == 1 && self.b1_recon == self.b1_truth
    }

    /// Upper bound on the exact Hausdorff distance given the sampling.
    pub fn hausdorff_bound(&self) -> f64 {
        self.hausdorff + self.resolution / 2.0
    }

    /// Geometry check that holds for the exact distance, not just the sampled one.
    pub fn geometry_certified(&self) -> bool {
        self.hausdorff_bound() < self.omega
    }
}

pub fn check_theorem(
    truth: &PlanarGraph,
    recon: &ReconstructedGraph,
    omega: f64,
    resolution: f64,
) -> Result<TheoremReport, VerifyError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(VerifyError::BadOmega(omega));
    }
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(VerifyError::BadResolution(resolution));
    }
    let b0_truth = truth.components();
    if b0_truth != 1 {
        return Err(VerifyError::Disconnected(b0_truth));
    }
    let truth_lines: Vec<&[Point]> = if truth.edges().is_empty() {
        truth.vertices().chunks(1).collect()
    } else {
        truth.edges().iter().map(|e| e.polyline.as_slice()).collect()
    };
    let hausdorff = match hausdorff_distance(truth_lines, recon.polylines(), resolution) {
        Ok(d) => d,
        Err(VerifyError::EmptySet) => f64::INFINITY,
        Err(e) => return Err(e),
    };

    let node_match = recon
        .nodes
        .iter()
        .enumerate()
        .map(|(node, n)| {
            let (graph_vertex, distance) = truth
                .vertices()
                .iter()
                .map(|v| v.dist(n.point))
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("connected graph has a vertex");
            NodeMatch { graph_vertex, node, distance }
        })
        .collect();

    let stats = graph_stats(recon);
    let mut report = TheoremReport {
        b0_truth,
        b1_truth: truth.first_betti(),
        b0_recon: stats.b0,
        b1_recon: stats.b1,
        hausdorff,
        omega,
        resolution,
        node_match,
        pass: false,
    };
    report.pass = report.topology_ok() && report.hausdorff < omega;
    Ok(report)
}
