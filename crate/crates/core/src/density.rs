//! Ground-truth graphs, the two-threshold noise model and density fields.
//!
//! A density is sampled on the vertices (pixels) of a [`GridSpec`]. Synthetic
//! fields place every pixel in one of three value bands according to its
//! [`RegionLabel`]: `[beta1, beta1 + nu]` near graph vertices, `[beta2, beta2 +
//! nu]` elsewhere within `omega` of the graph, and `[0, nu]` outside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::complex::GridSpec;
use crate::geom::{self, Point};

/// Tolerance used when validating graph embeddings.
pub const EMBED_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} has non-finite coordinates")]
    NonFiniteVertex(usize),
    #[error("edge {edge} refers to vertex {vertex}, but the graph has {len} vertices")]
    VertexOutOfRange { edge: usize, vertex: usize, len: usize },
    #[error("edge {0} is a self-loop")]
    SelfLoop(usize),
    #[error("edges {0} and {1} join the same pair of vertices")]
    DuplicateEdge(usize, usize),
    #[error("edge {0} polyline must have at least two finite points")]
    BadPolyline(usize),
    #[error("edge {0} polyline does not start and end at its endpoint vertices")]
    PolylineEndpoints(usize),
    #[error("edges {0} and {1} intersect away from a shared endpoint")]
    Crossing(usize, usize),
}

#[derive(Debug, Error, PartialEq)]
pub enum DensityError {
    #[error("noise parameters violate beta1 > beta2 + 2*nu and beta2 > 2*nu (beta1={beta1}, beta2={beta2}, nu={nu})")]
    ThresholdInequality { beta1: f64, beta2: f64, nu: f64 },
    #[error("noise parameters need omega > 0 and nu >= 0 (omega={omega}, nu={nu})")]
    BadParams { omega: f64, nu: f64 },
    #[error("margin check failed: the omega-offset of the graph must stay at least one grid spacing inside the grid rectangle")]
    Margin,
    #[error("separation check failed: vertices {0} and {1} are not more than 2*omega apart ({2})")]
    VertexSeparation(usize, usize, f64),
    #[error("separation check failed: non-adjacent edges {0} and {1} are not more than 2*omega apart ({2})")]
    EdgeSeparation(usize, usize, f64),
    #[error("resolution check failed: spacing {spacing} exceeds omega/2 = {limit}")]
    Resolution { spacing: f64, limit: f64 },
    #[error("density has {got} values, grid needs {want}")]
    SizeMismatch { got: usize, want: usize },
    #[error("density value at vertex {0} is negative or not finite")]
    BadValue(usize),
    #[error("kernel bandwidth must be positive and finite, got {0}")]
    BadBandwidth(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub polyline: Vec<Point>,
}

/// A simple graph embedded in the plane, each edge carrying its geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarGraph {
    vertices: Vec<Point>,
    edges: Vec<GraphEdge>,
}

impl PlanarGraph {
    /// Graph with straight-segment edges.
    pub fn straight(vertices: Vec<Point>, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let n = vertices.len();
        let edges = edges
            .iter()
            .enumerate()
            .map(|(k, &(u, v))| {
                for w in [u, v] {
                    if w >= n {
                        return Err(GraphError::VertexOutOfRange { edge: k, vertex: w, len: n });
                    }
                }
                Ok(GraphEdge { u, v, polyline: vec![vertices[u], vertices[v]] })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(vertices, edges)
    }

    pub fn new(vertices: Vec<Point>, edges: Vec<GraphEdge>) -> Result<Self, GraphError> {
        let graph = Self { vertices, edges };
        graph.validate()?;
        Ok(graph)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn first_betti(&self) -> usize {
        let b0 = self.components();
        (self.edges.len() + b0).saturating_sub(self.vertices.len())
    }

    /// Number of connected components.
    pub fn components(&self) -> usize {
        let mut uf = crate::union_find::UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.u, e.v);
        }
        uf.count()
    }

    pub fn is_connected(&self) -> bool {
        self.components() == 1
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.edges.iter().filter(|e| e.u == vertex || e.v == vertex).count()
    }

    fn validate(&self) -> Result<(), GraphError> {
        let n = self.vertices.len();
        for (k, p) in self.vertices.iter().enumerate() {
            if !p.is_finite() {
                return Err(GraphError::NonFiniteVertex(k));
            }
        }
        let mut seen = std::collections::HashMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            for w in [e.u, e.v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { edge: k, vertex: w, len: n });
                }
            }
            if e.u == e.v {
                return Err(GraphError::SelfLoop(k));
            }
            if let Some(&other) = seen.get(&(e.u.min(e.v), e.u.max(e.v))) {
                return Err(GraphError::DuplicateEdge(other, k));
            }
            seen.insert((e.u.min(e.v), e.u.max(e.v)), k);
            if e.polyline.len() < 2 || e.polyline.iter().any(|p| !p.is_finite()) {
                return Err(GraphError::BadPolyline(k));
            }
            let (first, last) = (e.polyline[0], e.polyline[e.polyline.len() - 1]);
            if first.dist(self.vertices[e.u]) > EMBED_TOL || last.dist(self.vertices[e.v]) > EMBED_TOL {
                return Err(GraphError::PolylineEndpoints(k));
            }
        }
        for a in 0..self.edges.len() {
            for b in a + 1..self.edges.len() {
                if self.edges_cross(a, b) {
                    return Err(GraphError::Crossing(a, b));
                }
            }
        }
        Ok(())
    }

    fn shared_vertex(&self, a: usize, b: usize) -> Option<usize> {
        let (ea, eb) = (&self.edges[a], &self.edges[b]);
        [ea.u, ea.v].into_iter().find(|&w| w == eb.u || w == eb.v)
    }

    fn edges_cross(&self, a: usize, b: usize) -> bool {
        let shared = self.shared_vertex(a, b).map(|w| self.vertices[w]);
        let (pa, pb) = (&self.edges[a].polyline, &self.edges[b].polyline);
        for s in pa.windows(2) {
            for t in pb.windows(2) {
                let d = geom::segment_segment_dist(s[0], s[1], t[0], t[1]);
                if d > EMBED_TOL {
                    continue;
                }
                let Some(w) = shared else {
                    return true;
                };
                let at_w = |p: Point| p.dist(w) <= EMBED_TOL;
                let s_far = if at_w(s[0]) { Some(s[1]) } else if at_w(s[1]) { Some(s[0]) } else { None };
                let t_far = if at_w(t[0]) { Some(t[1]) } else if at_w(t[1]) { Some(t[0]) } else { None };
                // Touching is allowed only between two segments that both leave
                // the shared vertex and do not overlap collinearly.
                match (s_far, t_far) {
                    (Some(sf), Some(tf)) => {
                        if geom::point_segment_dist(sf, t[0], t[1]) <= EMBED_TOL
                            || geom::point_segment_dist(tf, s[0], s[1]) <= EMBED_TOL
                        {
                            return true;
                        }
                    }
                    _ => return true,
                }
            }
        }
        false
    }

    /// Distance from `p` to the union of edge polylines (or to the vertices,
    /// for a graph without edges).
    pub fn distance_to(&self, p: Point) -> f64 {
        let to_edges = self
            .edges
            .iter()
            .map(|e| geom::point_polyline_dist(p, &e.polyline))
            .fold(f64::INFINITY, f64::min);
        let to_vertices = self.vertices.iter().map(|v| p.dist(*v)).fold(f64::INFINITY, f64::min);
        to_edges.min(to_vertices)
    }

    fn bounding_box(&self) -> Option<(Point, Point)> {
        let pts = self.vertices.iter().chain(self.edges.iter().flat_map(|e| e.polyline.iter()));
        pts.fold(None, |acc, p| {
            Some(match acc {
                None => (*p, *p),
                Some((lo, hi)) => (
                    Point::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Point::new(hi.x.max(p.x), hi.y.max(p.y)),
                ),
            })
        })
    }
}

/// Offset radius `omega`, the two thresholds and the noise amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub omega: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub nu: f64,
}

impl NoiseParams {
    pub fn new(omega: f64, beta1: f64, beta2: f64, nu: f64) -> Result<Self, DensityError> {
        let params = Self { omega, beta1, beta2, nu };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), DensityError> {
        let finite = [self.omega, self.beta1, self.beta2, self.nu].iter().all(|x| x.is_finite());
        if !finite || self.omega <= 0.0 || self.nu < 0.0 {
            return Err(DensityError::BadParams { omega: self.omega, nu: self.nu });
        }
        if !(self.beta1 > self.beta2 + 2.0 * self.nu && self.beta2 > 2.0 * self.nu) {
            return Err(DensityError::ThresholdInequality {
                beta1: self.beta1,
                beta2: self.beta2,
                nu: self.nu,
            });
        }
        Ok(())
    }

    /// Open interval of admissible persistence cut-offs:
    /// `(nu, min(beta2 - nu, beta1 - beta2 - nu))`.
    pub fn delta_range(&self) -> (f64, f64) {
        (self.nu, (self.beta2 - self.nu).min(self.beta1 - self.beta2 - self.nu))
    }

    pub fn admits_delta(&self, delta: f64) -> bool {
        let (lo, hi) = self.delta_range();
        lo < delta && delta < hi
    }
}

/// Free-function form of [`NoiseParams::delta_range`].
pub fn delta_range(params: &NoiseParams) -> (f64, f64) {
    params.delta_range()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegionLabel {
    VertexRegion,
    EdgeRegion,
    Outside,
}

/// Region of `p` relative to `graph`; vertex balls take priority over edges.
pub fn classify_point(graph: &PlanarGraph, params: &NoiseParams, p: Point) -> RegionLabel {
    let omega = params.omega;
    if graph.vertices.iter().any(|v| p.dist(*v) <= omega) {
        RegionLabel::VertexRegion
    } else if graph.edges.iter().any(|e| geom::point_polyline_dist(p, &e.polyline) <= omega) {
        RegionLabel::EdgeRegion
    } else {
        RegionLabel::Outside
    }
}

/// Density sampled on the vertices of a grid, row-major with row 0 at the
/// lowest `y` (the same order as vertex dense indices).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl DensityField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, DensityError> {
        let want = grid.num_vertices();
        if values.len() != want {
            return Err(DensityError::SizeMismatch { got: values.len(), want });
        }
        if let Some(k) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(DensityError::BadValue(k));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { values: vec![0.0; grid.num_vertices()], grid }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.nx + i]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Pointwise sum with a field on the same grid.
    pub fn add(&self, other: &DensityField) -> Result<DensityField, DensityError> {
        if self.grid != other.grid {
            return Err(DensityError::SizeMismatch { got: other.values.len(), want: self.values.len() });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(DensityField { grid: self.grid, values })
    }
}

/// Where the per-pixel noise term comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSource {
    /// Independent uniform draws on `[0, nu]` from a seeded generator.
    Uniform { seed: u64 },
    /// The same fraction of `nu` everywhere; `0.0` and `1.0` are the all-low
    /// and all-high extremes.
    Constant(f64),
}

/// Checks the geometric preconditions for synthesis.
pub fn check_synth_preconditions(
    graph: &PlanarGraph,
    params: &NoiseParams,
    grid: &GridSpec,
) -> Result<(), DensityError> {
    params.validate()?;
    let omega = params.omega;
    let limit = omega / 2.0;
    if grid.spacing > limit {
        return Err(DensityError::Resolution { spacing: grid.spacing, limit });
    }
    if let Some((lo, hi)) = graph.bounding_box() {
        let (glo, ghi) = (grid.origin, grid.max_corner());
        let m = omega + grid.spacing;
        if lo.x - m < glo.x || lo.y - m < glo.y || hi.x + m > ghi.x || hi.y + m > ghi.y {
            return Err(DensityError::Margin);
        }
    }
    let vs = graph.vertices();
    for a in 0..vs.len() {
        for b in a + 1..vs.len() {
            let d = vs[a].dist(vs[b]);
            if d <= 2.0 * omega {
                return Err(DensityError::VertexSeparation(a, b, d));
            }
        }
    }
    let es = graph.edges();
    for a in 0..es.len() {
        for b in a + 1..es.len() {
            if graph.shared_vertex(a, b).is_some() {
                continue;
            }
            let d = geom::polyline_polyline_dist(&es[a].polyline, &es[b].polyline);
            if d <= 2.0 * omega {
                return Err(DensityError::EdgeSeparation(a, b, d));
            }
        }
    }
    Ok(())
}

/// Synthetic (omega, beta1, beta2, nu) density for `graph` with uniform noise.
pub fn synth_density(
    graph: &PlanarGraph,
    params: &NoiseParams,
    grid: &GridSpec,
    seed: u64,
) -> Result<DensityField, DensityError> {
    synth_density_with(graph, params, grid, NoiseSource::Uniform { seed })
}

pub fn synth_density_with(
    graph: &PlanarGraph,
    params: &NoiseParams,
    grid: &GridSpec,
    noise: NoiseSource,
) -> Result<DensityField, DensityError> {
    check_synth_preconditions(graph, params, grid)?;
    let mut rng = match noise {
        NoiseSource::Uniform { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        NoiseSource::Constant(_) => None,
    };
    let mut values = Vec::with_capacity(grid.num_vertices());
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let base = match classify_point(graph, params, grid.world(i, j)) {
                RegionLabel::VertexRegion => params.beta1,
                RegionLabel::EdgeRegion => params.beta2,
                RegionLabel::Outside => 0.0,
            };
            let u = match (&mut rng, noise) {
                (Some(rng), _) => rng.gen::<f64>() * params.nu,
                (None, NoiseSource::Constant(frac)) => frac.clamp(0.0, 1.0) * params.nu,
                (None, _) => unreachable!(),
            };
            values.push(base + u);
        }
    }
    DensityField::new(*grid, values)
}

/// Per-pixel counts of the nearest grid vertex; the second value is the number
/// of points that fell outside the grid rectangle and were clamped.
pub fn histogram_density(points: &[Point], grid: &GridSpec) -> (DensityField, usize) {
    let mut field = DensityField::zeros(*grid);
    let mut clamped = 0;
    let nearest = |t: f64, n: usize| -> (usize, bool) {
        // round half down
        let r = (t - 0.5).ceil();
        if r < 0.0 {
            (0, t < 0.0)
        } else if r > (n - 1) as f64 {
            (n - 1, t > (n - 1) as f64)
        } else {
            (r as usize, false)
        }
    };
    for p in points {
        let (i, ox) = nearest((p.x - grid.origin.x) / grid.spacing, grid.nx);
        let (j, oy) = nearest((p.y - grid.origin.y) / grid.spacing, grid.ny);
        if ox || oy || !p.is_finite() {
            clamped += 1;
        }
        field.values[j * grid.nx + i] += 1.0;
    }
    (field, clamped)
}

/// Gaussian kernel density, truncated at four bandwidths, unnormalised so a
/// single point contributes 1.0 at its own location.
pub fn kde_density(points: &[Point], grid: &GridSpec, bandwidth: f64) -> Result<DensityField, DensityError> {
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(DensityError::BadBandwidth(bandwidth));
    }
    let mut field = DensityField::zeros(*grid);
    let radius = 4.0 * bandwidth;
    let inv = 1.0 / (2.0 * bandwidth * bandwidth);
    let s = grid.spacing;
    let span = |c: f64, o: f64, n: usize| {
        let lo = ((c - radius - o) / s).ceil().max(0.0);
        let hi = ((c + radius - o) / s).floor().min((n - 1) as f64);
        (lo as usize, hi as isize)
    };
    for q in points.iter().filter(|q| q.is_finite()) {
        let (ilo, ihi) = span(q.x, grid.origin.x, grid.nx);
        let (jlo, jhi) = span(q.y, grid.origin.y, grid.ny);
        if ihi < 0 || jhi < 0 {
            continue;
        }
        for j in jlo..=jhi as usize {
            for i in ilo..=ihi as usize {
                let d2 = grid.world(i, j).dist_sq(*q);
                if d2 <= radius * radius {
                    field.values[j * grid.nx + i] += (-d2 * inv).exp();
                }
            }
        }
    }
    Ok(field)
}
