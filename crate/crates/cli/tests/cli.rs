mod common;

use std::fs;

use common::{code, dmgraph, fixture, s, standard_flags, stderr};
use dmgraph::density::{classify_point, RegionLabel};
use dmgraph::fixtures::Family;
use dmgraph::io::{graph_to_json, parse_dgrid, parse_recon_json, read_graph, recon_to_json};
use dmgraph::{graph_stats, NoiseParams, PlanarGraph, Point};

#[test]
fn shipped_fixtures_match_the_library() {
    for f in Family::ALL {
        let path = fixture(f.name());
        assert_eq!(read_graph(&path).unwrap(), f.graph(), "{}", f.name());
        assert_eq!(fs::read_to_string(&path).unwrap(), graph_to_json(&f.graph()));
    }
}

fn small_star(dir: &std::path::Path) -> std::path::PathBuf {
    let p = Point::new;
    let g = PlanarGraph::straight(
        vec![p(8.1, 7.0), p(8.1, 13.0), p(3.1, 2.0), p(13.1, 2.0)],
        &[(0, 1), (0, 2), (0, 3)],
    )
    .unwrap();
    let path = dir.join("star.json");
    fs::write(&path, graph_to_json(&g)).unwrap();
    path
}

#[test]
fn synth_values_follow_the_region_intervals() {
    let dir = tempfile::tempdir().unwrap();
    let graph = small_star(dir.path());
    let out = dir.path().join("d.dgrid");
    let args = [
        "synth", "--graph", &s(&graph), "--omega", "0.5", "--beta1", "10", "--beta2", "4", "--nu", "1",
        "--nx", "64", "--ny", "64", "--spacing", "0.25", "--seed", "7", "--out", &s(&out),
    ];
    let o = dmgraph(args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let field = parse_dgrid(&fs::read_to_string(&out).unwrap()).unwrap();
    let g = read_graph(&graph).unwrap();
    let params = NoiseParams::new(0.5, 10.0, 4.0, 1.0).unwrap();
    let grid = *field.grid();
    let mut seen = [0usize; 3];
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let v = field.value(i, j);
            let (k, lo) = match classify_point(&g, &params, grid.world(i, j)) {
                RegionLabel::VertexRegion => (0, 10.0),
                RegionLabel::EdgeRegion => (1, 4.0),
                RegionLabel::Outside => (2, 0.0),
            };
            assert!(lo <= v && v <= lo + 1.0, "pixel ({i},{j}) = {v}");
            seen[k] += 1;
        }
    }
    assert!(seen.iter().all(|&n| n > 0));

    // same seed, same bytes
    let again = dir.path().join("e.dgrid");
    let mut args2 = args.map(String::from).to_vec();
    *args2.last_mut().unwrap() = s(&again);
    assert_eq!(code(&dmgraph(&args2)), 0);
    assert_eq!(fs::read(&out).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn synth_rejects_equal_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.dgrid");
    let o = dmgraph([
        "synth", "--graph", &s(&fixture("star")), "--omega", "3", "--beta1", "4", "--beta2", "4", "--nu", "1",
        "--nx", "96", "--ny", "96", "--out", &s(&out),
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("beta1 > beta2 + 2*nu"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn synth_prints_delta_range() {
    let mut args = vec!["synth".to_string(), "--graph".into(), s(&fixture("path")), "--print-delta-range".into()];
    args.extend(standard_flags());
    let o = dmgraph(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"low": 1.0, "high": 3.0, "midpoint": 2.0}));
}

fn synth_fixture(dir: &std::path::Path, name: &str, seed: u64) -> std::path::PathBuf {
    let out = dir.join(format!("{name}-{seed}.dgrid"));
    let mut args = vec!["synth".to_string(), "--graph".into(), s(&fixture(name)), "--seed".into(), seed.to_string()];
    args.extend(standard_flags());
    args.extend(["--out".into(), s(&out)]);
    let o = dmgraph(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out
}

#[test]
fn round_trip_synth_reconstruct_verify() {
    let dir = tempfile::tempdir().unwrap();
    let density = synth_fixture(dir.path(), "cycle", 4);
    let recon = dir.path().join("r.json");
    let diagram = dir.path().join("p.csv");
    let o = dmgraph([
        "reconstruct", "--density", &s(&density), "--delta", "2", "--out", &s(&recon), "--diagram", &s(&diagram),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let g = parse_recon_json(&fs::read_to_string(&recon).unwrap()).unwrap();
    let st = graph_stats(&g);
    assert_eq!((st.b0, st.b1), (1, 1));
    let csv = fs::read_to_string(&diagram).unwrap();
    assert!(csv.starts_with("dim,birth_value,death_value,persistence,birth_cell,death_cell\n"));
    assert_eq!(csv.lines().filter(|l| l.contains(",inf,inf,")).count(), 1);

    let report = dir.path().join("report.json");
    let o = dmgraph([
        "verify", "--graph", &s(&fixture("cycle")), "--recon", &s(&recon), "--omega", "3", "--out", &s(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    for key in ["b0_truth", "b1_truth", "b0_recon", "b1_recon", "hausdorff", "omega", "resolution", "node_match", "pass"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["pass"], serde_json::json!(true));
    assert_eq!(v["resolution"], serde_json::json!(0.25));
    assert_eq!(v["node_match"].as_array().unwrap().len(), 4);
}

#[test]
fn huge_delta_gives_empty_graph_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let density = synth_fixture(dir.path(), "path", 1);
    let recon = dir.path().join("r.json");
    let o = dmgraph(["reconstruct", "--density", &s(&density), "--delta", "1000", "--out", &s(&recon)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert!(parse_recon_json(&fs::read_to_string(&recon).unwrap()).unwrap().is_empty());

    // verifying an empty reconstruction fails but is not an error
    let o = dmgraph(["verify", "--graph", &s(&fixture("path")), "--recon", &s(&recon), "--omega", "3"]);
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["hausdorff"], serde_json::json!("inf"));
}

#[test]
fn constant_density_reconstructs_to_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let density = dir.path().join("c.dgrid");
    let mut text = String::from("DGRID 1\n5 4\n0 0 1\n");
    for _ in 0..4 {
        text.push_str("3 3 3 3 3\n");
    }
    fs::write(&density, text).unwrap();
    let recon = dir.path().join("r.json");
    let o = dmgraph(["reconstruct", "--density", &s(&density), "--delta", "1", "--out", &s(&recon)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(parse_recon_json(&fs::read_to_string(&recon).unwrap()).unwrap().is_empty());
}

#[test]
fn malformed_density_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let density = dir.path().join("bad.dgrid");
    fs::write(&density, "DGRID 1\n2 2\n0 0 1\n1 2\n3 x\n").unwrap();
    let o = dmgraph(["reconstruct", "--density", &s(&density), "--delta", "1", "--out", &s(&dir.path().join("r.json"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
}

#[test]
fn delta_is_checked_against_known_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let density = synth_fixture(dir.path(), "path", 2);
    let recon = dir.path().join("r.json");
    let base = ["reconstruct", "--density", &s(&density), "--out", &s(&recon), "--beta1", "10", "--beta2", "4", "--nu", "1"];
    let o = dmgraph(base.iter().copied().chain(["--delta", "0.5"]));
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("(1, 3)"), "{}", stderr(&o));
    assert!(!recon.exists());
    let o = dmgraph(base.iter().copied().chain(["--delta", "2"]));
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    // an incomplete set of thresholds is a usage error
    let o = dmgraph(["reconstruct", "--density", &s(&density), "--out", &s(&recon), "--delta", "2", "--nu", "1"]);
    assert_eq!(code(&o), 2);
}

fn write_recon(dir: &std::path::Path, name: &str, g: &dmgraph::ReconstructedGraph) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, recon_to_json(g)).unwrap();
    path
}

fn copy_as_recon(g: &PlanarGraph) -> dmgraph::ReconstructedGraph {
    use dmgraph::extraction::{ReconEdge, ReconNode};
    dmgraph::ReconstructedGraph {
        nodes: g.vertices().iter().enumerate().map(|(cell, &point)| ReconNode { cell, point }).collect(),
        edges: g
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| ReconEdge {
                u: e.u,
                v: e.v,
                polyline: e.polyline.clone(),
                critical_edge: k,
                persistence: 5.0,
                source: dmgraph::EdgeSource::VertexEdge,
            })
            .collect(),
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let truth = fixture("star");
    let g = read_graph(&truth).unwrap();
    let verify = |recon: &std::path::Path| {
        dmgraph(["verify", "--graph", &s(&truth), "--recon", &s(recon), "--omega", "3", "--resolution", "0.25"])
    };

    let exact = write_recon(dir.path(), "exact.json", &copy_as_recon(&g));
    assert_eq!(code(&verify(&exact)), 0);

    let mut cyclic = copy_as_recon(&g);
    let mut extra = cyclic.edges[0].clone();
    extra.u = 2;
    extra.v = 3;
    extra.polyline = vec![g.vertices()[2], g.vertices()[3]];
    cyclic.edges.push(extra);
    let o = verify(&write_recon(dir.path(), "cyclic.json", &cyclic));
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("Betti"), "{}", stderr(&o));

    let o = verify(&dir.path().join("missing.json"));
    assert_eq!(code(&o), 2);
}

#[test]
fn hist_and_kde_from_points() {
    let dir = tempfile::tempdir().unwrap();
    let points = dir.path().join("pts.csv");
    fs::write(&points, "x,y\n1.2,1.9\n1.0,2.0\n3.0,0.4\n").unwrap();
    let hist = dir.path().join("h.dgrid");
    let o = dmgraph(["hist", "--points", &s(&points), "--nx", "5", "--ny", "4", "--out", &s(&hist)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("header"));
    let h = parse_dgrid(&fs::read_to_string(&hist).unwrap()).unwrap();
    assert_eq!(h.value(1, 2), 2.0);
    assert_eq!(h.value(3, 0), 1.0);
    assert_eq!(h.values().iter().sum::<f64>(), 3.0);

    let kde = dir.path().join("k.dgrid");
    let o = dmgraph(["kde", "--points", &s(&points), "--nx", "5", "--ny", "4", "--bandwidth", "0.5", "--out", &s(&kde)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let k = parse_dgrid(&fs::read_to_string(&kde).unwrap()).unwrap();
    assert!(k.value(1, 2) > k.value(4, 3));

    let o = dmgraph(["kde", "--points", &s(&points), "--nx", "5", "--ny", "4", "--bandwidth", "0", "--out", &s(&kde)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn render_layers() {
    let dir = tempfile::tempdir().unwrap();
    let density = synth_fixture(dir.path(), "star", 3);
    let recon = dir.path().join("r.json");
    assert_eq!(code(&dmgraph(["reconstruct", "--density", &s(&density), "--delta", "2", "--out", &s(&recon)])), 0);

    let only = dir.path().join("d.svg");
    assert_eq!(code(&dmgraph(["render", "--density", &s(&density), "--out", &s(&only)])), 0);
    let svg = fs::read_to_string(&only).unwrap();
    assert_eq!(svg.matches("<rect").count(), 96 * 96);
    assert!(svg.contains("rgb(255,255,255)") || svg.contains("rgb(254,254,254)"));
    assert!(svg.contains("rgb(0,0,0)"));

    let both = dir.path().join("b.svg");
    let args = ["render", "--graph", &s(&fixture("star")), "--recon", &s(&recon), "--out", &s(&both)];
    assert_eq!(code(&dmgraph(args)), 0);
    let svg = fs::read_to_string(&both).unwrap();
    let truth_layer = svg.split("<g id=\"truth\"").nth(1).unwrap().split("</g>").next().unwrap();
    let recon_layer = svg.split("<g id=\"recon\"").nth(1).unwrap().split("</g>").next().unwrap();
    assert_eq!(truth_layer.matches("<path").count(), 3);
    assert_eq!(recon_layer.matches("<path").count(), 3);
    assert!(recon_layer.contains("#2ca02c"));
    assert!(!truth_layer.contains("#2ca02c"));
    assert_eq!(svg.matches("<circle").count(), 4);
    let again = dir.path().join("b2.svg");
    assert_eq!(code(&dmgraph(["render", "--graph", &s(&fixture("star")), "--recon", &s(&recon), "--out", &s(&again)])), 0);
    assert_eq!(fs::read(&both).unwrap(), fs::read(&again).unwrap());

    let empty = write_recon(dir.path(), "empty.json", &dmgraph::ReconstructedGraph::default());
    let e = dir.path().join("e.svg");
    assert_eq!(code(&dmgraph(["render", "--recon", &s(&empty), "--out", &s(&e)])), 0);
    assert!(fs::read_to_string(&e).unwrap().trim_end().ends_with("</svg>"));

    assert_eq!(code(&dmgraph(["render", "--out", &s(&e)])), 2);
}

#[test]
fn pipeline_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let mut args = vec!["pipeline".to_string(), "--graph".into(), s(&fixture("theta")), "--seed".into(), "5".into()];
    args.extend(standard_flags());
    args.extend(["--out".into(), s(&out)]);
    let o = dmgraph(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["density.dgrid", "diagram.csv", "recon.json", "report.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(v["b1_recon"], serde_json::json!(2));

    args.extend(["--delta".into(), "3.5".into()]);
    let o = dmgraph(&args);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("admissible interval"));
}
