//! Reconstructed graph: stable manifolds of the surviving critical edges.

use thiserror::Error;

use crate::complex::CubicalComplex;
use crate::geom::{polyline_length, Point};
use crate::morse::{DiscreteVectorField, Match};
use crate::persistence::PersistenceDiagram;
use crate::union_find::UnionFind;

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("cell {0} is not an edge")]
    NotAnEdge(usize),
    #[error("selected edge {0} is not critical; simplification cancelled a significant pair")]
    NotCritical(usize),
    #[error("trace from vertex {0} exceeds the cell count; the vector field has a cycle")]
    Cyclic(usize),
    #[error("diagram covers {diagram} cells but the field has {field}")]
    DiagramMismatch { diagram: usize, field: usize },
}

/// Which kind of persistence pair selected an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeSource {
    /// Death of a vertex/edge pair: joins two components.
    VertexEdge,
    /// Birth of an edge/square pair: closes a cycle.
    EdgeSquare,
    /// Birth of an essential one-dimensional class.
    Essential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconNode {
    /// Dense index of the critical vertex.
    pub cell: usize,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconEdge {
    /// Node indices of the two ends; equal for a loop.
    pub u: usize,
    pub v: usize,
    pub polyline: Vec<Point>,
    pub critical_edge: usize,
    pub persistence: f64,
    pub source: EdgeSource,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReconstructedGraph {
    pub nodes: Vec<ReconNode>,
    pub edges: Vec<ReconEdge>,
}

impl ReconstructedGraph {
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn polylines(&self) -> impl Iterator<Item = &[Point]> {
        self.edges.iter().map(|e| e.polyline.as_slice())
    }
}

/// Grid-vertex path of a stable manifold, from one critical vertex through
/// the critical edge to the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StableManifold {
    pub vertices: Vec<usize>,
}

impl StableManifold {
    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().expect("nonempty")
    }

    pub fn is_loop(&self) -> bool {
        self.start() == self.end()
    }

    pub fn polyline(&self, complex: &CubicalComplex) -> Vec<Point> {
        self.vertices.iter().map(|&v| complex.vertex_point(v)).collect()
    }
}

/// Follows vertex-to-edge matches from `start` until a critical vertex.
fn trace(field: &DiscreteVectorField, start: usize) -> Result<Vec<usize>, ExtractError> {
    let complex = field.complex();
    let limit = complex.num_cells();
    let mut path = vec![start];
    let mut cur = start;
    while let Match::Up(edge) = field.state(cur) {
        cur = complex.other_endpoint(edge, cur);
        path.push(cur);
        if path.len() > limit {
            return Err(ExtractError::Cyclic(start));
        }
    }
    Ok(path)
}

/// Stable manifold of the critical edge `edge`: both endpoint traces joined
/// through the edge.
pub fn stable_manifold(field: &DiscreteVectorField, edge: usize) -> Result<StableManifold, ExtractError> {
    let complex = field.complex();
    if edge >= complex.num_cells() || complex.dim(edge) != 1 {
        return Err(ExtractError::NotAnEdge(edge));
    }
    if !field.is_critical(edge) {
        return Err(ExtractError::NotCritical(edge));
    }
    let ends = complex.face_indices(edge);
    let mut vertices = trace(field, ends[0])?;
    vertices.reverse();
    vertices.extend(trace(field, ends[1])?);
    Ok(StableManifold { vertices })
}

/// Critical edges kept at cut-off `delta`, ascending by cell index.
pub fn selected_edges(diagram: &PersistenceDiagram, delta: f64) -> Vec<(usize, f64, EdgeSource)> {
    let mut out: Vec<(usize, f64, EdgeSource)> = diagram
        .pairs()
        .iter()
        .filter(|p| p.persistence() >= delta)
        .filter_map(|p| match (p.dim, p.death) {
            (0, Some(e)) => Some((e, p.persistence(), EdgeSource::VertexEdge)),
            (1, Some(_)) => Some((p.birth, p.persistence(), EdgeSource::EdgeSquare)),
            (1, None) => Some((p.birth, p.persistence(), EdgeSource::Essential)),
            _ => None,
        })
        .collect();
    out.sort_by_key(|s| s.0);
    out
}

/// Union of the stable manifolds of every edge selected at `delta`.
pub fn extract_graph(
    field: &DiscreteVectorField,
    diagram: &PersistenceDiagram,
    delta: f64,
) -> Result<ReconstructedGraph, ExtractError> {
    let complex = field.complex();
    if diagram.num_cells() != complex.num_cells() {
        return Err(ExtractError::DiagramMismatch { diagram: diagram.num_cells(), field: complex.num_cells() });
    }
    let selected = selected_edges(diagram, delta);
    let mut manifolds = Vec::with_capacity(selected.len());
    for &(edge, _, _) in &selected {
        if !field.is_critical(edge) {
            return Err(ExtractError::NotCritical(edge));
        }
        manifolds.push(stable_manifold(field, edge)?);
    }

    let mut node_cells: Vec<usize> = manifolds.iter().flat_map(|m| [m.start(), m.end()]).collect();
    node_cells.sort_unstable();
    node_cells.dedup();
    let node_of = |cell: usize| node_cells.binary_search(&cell).expect("endpoint is a node");

    let edges = selected
        .iter()
        .zip(&manifolds)
        .map(|(&(critical_edge, persistence, source), m)| ReconEdge {
            u: node_of(m.start()),
            v: node_of(m.end()),
            polyline: m.polyline(complex),
            critical_edge,
            persistence,
            source,
        })
        .collect();
    let nodes = node_cells
        .iter()
        .map(|&cell| ReconNode { cell, point: complex.vertex_point(cell) })
        .collect();
    Ok(ReconstructedGraph { nodes, edges })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub nodes: usize,
    pub edges: usize,
    pub b0: usize,
    pub b1: usize,
    pub length: f64,
}

pub fn graph_stats(graph: &ReconstructedGraph) -> GraphStats {
    let mut uf = UnionFind::new(graph.nodes.len());
    for e in &graph.edges {
        uf.union(e.u, e.v);
    }
    let b0 = uf.count();
    GraphStats {
        nodes: graph.nodes.len(),
        edges: graph.edges.len(),
        b0,
        b1: graph.edges.len() + b0 - graph.nodes.len(),
        length: graph.edges.iter().map(|e| polyline_length(&e.polyline)).sum(),
    }
}
