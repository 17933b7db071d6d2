//! Text file formats: DGRID densities, graph JSON, point CSV.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, GridSpec};
use crate::density::{DensityError, DensityField, GraphEdge, GraphError, PlanarGraph};
use crate::extraction::{EdgeSource, ReconEdge, ReconNode, ReconstructedGraph};
use crate::geom::Point;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Grid(#[from] ComplexError),
    #[error(transparent)]
    Density(#[from] DensityError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("reconstruction file: {0}")]
    Recon(String),
}

fn parse_err(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse { line, message: message.into() }
}

fn json_err(e: serde_json::Error) -> IoError {
    parse_err(e.line(), e.to_string())
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File { path: path.display().to_string(), source })
}

/// Floats that may be infinite: numbers in JSON, or the string `"inf"`.
pub mod inf_float {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
        if value.is_finite() {
            s.serialize_f64(*value)
        } else if value.is_nan() {
            s.serialize_str("nan")
        } else if *value > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {other:?}"))),
            },
        }
    }
}

// ---- DGRID v1 ----

pub fn dgrid_to_string(field: &DensityField) -> String {
    let g = field.grid();
    let mut out = format!("DGRID 1\n{} {}\n{} {} {}\n", g.nx, g.ny, g.origin.x, g.origin.y, g.spacing);
    for row in field.values().chunks(g.nx) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn parse_fields<T: std::str::FromStr>(line: usize, text: &str, want: usize, what: &str) -> Result<Vec<T>, IoError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != want {
        return Err(parse_err(line, format!("expected {want} {what}, found {}", parts.len())));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| parse_err(line, format!("cannot parse {p:?} as {what}"))))
        .collect()
}

pub fn parse_dgrid(text: &str) -> Result<DensityField, IoError> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    let mut next = |what: &str| lines.next().ok_or_else(|| parse_err(0, format!("unexpected end of file, expected {what}")));

    let (n, header) = next("header")?;
    if header.trim() != "DGRID 1" {
        return Err(parse_err(n, format!("expected header \"DGRID 1\", found {:?}", header.trim())));
    }
    let (n, dims) = next("grid size")?;
    let dims: Vec<usize> = parse_fields(n, dims, 2, "grid dimensions")?;
    let (n, geo) = next("origin and spacing")?;
    let geo: Vec<f64> = parse_fields(n, geo, 3, "origin/spacing values")?;
    let grid = GridSpec::new(dims[0], dims[1], Point::new(geo[0], geo[1]), geo[2])?;

    let mut values = Vec::with_capacity(grid.num_vertices());
    for row in 0..grid.ny {
        let (n, line) = next(&format!("row {row}"))?;
        values.extend(parse_fields::<f64>(n, line, grid.nx, "values")?);
    }
    for (n, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(parse_err(n, "unexpected data after the last row"));
        }
    }
    Ok(DensityField::new(grid, values)?)
}

pub fn read_dgrid(path: &Path) -> Result<DensityField, IoError> {
    parse_dgrid(&read_text(path)?)
}

pub fn write_dgrid(path: &Path, field: &DensityField) -> Result<(), IoError> {
    write_text(path, &dgrid_to_string(field))
}

// ---- graph JSON ----

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: Vec<Point>,
    edges: Vec<EdgeRecord>,
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    u: usize,
    v: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polyline: Option<Vec<Point>>,
}

/// One array element per line, each element compact.
fn json_lines(fields: &[(&str, Vec<String>)]) -> String {
    let mut out = String::from("{\n");
    for (k, (name, items)) in fields.iter().enumerate() {
        out.push_str(&format!("  \"{name}\": ["));
        if !items.is_empty() {
            out.push('\n');
            out.push_str(&items.iter().map(|i| format!("    {i}")).collect::<Vec<_>>().join(",\n"));
            out.push_str("\n  ");
        }
        out.push(']');
        out.push_str(if k + 1 < fields.len() { ",\n" } else { "\n" });
    }
    out.push_str("}\n");
    out
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

pub fn parse_graph_json(text: &str) -> Result<PlanarGraph, IoError> {
    let file: GraphFile = serde_json::from_str(text).map_err(json_err)?;
    let n = file.vertices.len();
    let mut edges = Vec::with_capacity(file.edges.len());
    for (k, e) in file.edges.into_iter().enumerate() {
        for w in [e.u, e.v] {
            if w >= n {
                return Err(GraphError::VertexOutOfRange { edge: k, vertex: w, len: n }.into());
            }
        }
        let polyline = e.polyline.unwrap_or_else(|| vec![file.vertices[e.u], file.vertices[e.v]]);
        edges.push(GraphEdge { u: e.u, v: e.v, polyline });
    }
    Ok(PlanarGraph::new(file.vertices, edges)?)
}

pub fn graph_to_json(graph: &PlanarGraph) -> String {
    json_lines(&[
        ("vertices", graph.vertices().iter().map(compact).collect()),
        (
            "edges",
            graph
                .edges()
                .iter()
                .map(|e| compact(&EdgeRecord { u: e.u, v: e.v, polyline: Some(e.polyline.clone()) }))
                .collect(),
        ),
    ])
}

pub fn read_graph(path: &Path) -> Result<PlanarGraph, IoError> {
    parse_graph_json(&read_text(path)?)
}

// ---- reconstruction JSON ----

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SourceRecord {
    VertexEdge,
    EdgeSquare,
    Essential,
}

#[derive(Serialize, Deserialize)]
struct ReconFile {
    vertices: Vec<Point>,
    edges: Vec<ReconEdgeRecord>,
    /// Dense index of the critical vertex behind each entry of `vertices`.
    node_cells: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ReconEdgeRecord {
    u: usize,
    v: usize,
    polyline: Vec<Point>,
    #[serde(with = "inf_float")]
    persistence: f64,
    critical_edge: usize,
    source: SourceRecord,
}

pub fn recon_to_json(graph: &ReconstructedGraph) -> String {
    let edges = graph
        .edges
        .iter()
        .map(|e| {
            compact(&ReconEdgeRecord {
                u: e.u,
                v: e.v,
                polyline: e.polyline.clone(),
                persistence: e.persistence,
                critical_edge: e.critical_edge,
                source: match e.source {
                    EdgeSource::VertexEdge => SourceRecord::VertexEdge,
                    EdgeSource::EdgeSquare => SourceRecord::EdgeSquare,
                    EdgeSource::Essential => SourceRecord::Essential,
                },
            })
        })
        .collect();
    json_lines(&[
        ("vertices", graph.nodes.iter().map(|n| compact(&n.point)).collect()),
        ("edges", edges),
        ("node_cells", graph.nodes.iter().map(|n| n.cell.to_string()).collect()),
    ])
}

pub fn parse_recon_json(text: &str) -> Result<ReconstructedGraph, IoError> {
    let file: ReconFile = serde_json::from_str(text).map_err(json_err)?;
    if file.node_cells.len() != file.vertices.len() {
        return Err(IoError::Recon(format!(
            "{} vertices but {} node cells",
            file.vertices.len(),
            file.node_cells.len()
        )));
    }
    let n = file.vertices.len();
    let nodes = file.vertices.into_iter().zip(file.node_cells).map(|(point, cell)| ReconNode { cell, point }).collect();
    let mut edges = Vec::with_capacity(file.edges.len());
    for (k, e) in file.edges.into_iter().enumerate() {
        if e.u >= n || e.v >= n {
            return Err(IoError::Recon(format!("edge {k} refers to a missing vertex")));
        }
        if e.polyline.is_empty() {
            return Err(IoError::Recon(format!("edge {k} has an empty polyline")));
        }
        edges.push(ReconEdge {
            u: e.u,
            v: e.v,
            polyline: e.polyline,
            critical_edge: e.critical_edge,
            persistence: e.persistence,
            source: match e.source {
                SourceRecord::VertexEdge => EdgeSource::VertexEdge,
                SourceRecord::EdgeSquare => EdgeSource::EdgeSquare,
                SourceRecord::Essential => EdgeSource::Essential,
            },
        });
    }
    Ok(ReconstructedGraph { nodes, edges })
}

pub fn read_recon(path: &Path) -> Result<ReconstructedGraph, IoError> {
    parse_recon_json(&read_text(path)?)
}

// ---- points CSV ----

/// Parsed points and, if the first line was not numeric, a warning saying
/// it was skipped.
pub fn parse_points_csv(text: &str) -> Result<(Vec<Point>, Option<String>), IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut points = Vec::new();
    let mut warning = None;
    for (k, record) in reader.records().enumerate() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(k + 1, |p| p.line() as usize);
        if record.len() != 2 {
            return Err(parse_err(line, format!("expected 2 columns, found {}", record.len())));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => points.push(Point::new(x, y)),
            (Ok(_), Ok(_)) => return Err(parse_err(line, "non-finite coordinate")),
            _ if k == 0 => warning = Some(format!("line {line}: skipping non-numeric header {:?}", record.as_slice())),
            _ => return Err(parse_err(line, format!("cannot parse {:?} as x,y", record.as_slice()))),
        }
    }
    Ok((points, warning))
}
