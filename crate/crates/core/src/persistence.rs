//! Persistence of the super-level-set filtration of a density on the complex.
//!
//! Each cell takes the minimum of its vertex values, so the sub-complex that
//! has entered at threshold `t` is exactly the full sub-complex on the pixels
//! with `f >= t`. Cells are ordered by descending value, then ascending
//! dimension, then ascending dense index.
//!
//! [`reduce`] computes the pairing with two union-find sweeps: a forward sweep
//! over edges for vertex/edge pairs and a backward sweep over the dual graph
//! (squares plus one outer node) for edge/square pairs. [`oracle_reduce`] is
//! the textbook Z/2 column reduction and serves as the reference.

use std::cmp::Ordering;
use std::fmt::Write as _;

use thiserror::Error;

use crate::complex::{Cell, CubicalComplex};
use crate::density::DensityField;
use crate::union_find::UnionFind;

/// Largest complex the column-reduction oracle accepts.
pub const ORACLE_MAX_CELLS: usize = 20_000;

#[derive(Debug, Error, PartialEq)]
pub enum PersistenceError {
    #[error("density grid {field:?} does not match complex grid {complex:?}")]
    GridMismatch { field: (usize, usize), complex: (usize, usize) },
    #[error("oracle refuses complexes with more than {max} cells (got {cells})")]
    OracleTooLarge { cells: usize, max: usize },
    #[error("internal pairing conflict at cell {0}")]
    Conflict(usize),
}

/// Cells of a complex in super-level order, with their values.
#[derive(Debug, Clone)]
pub struct Filtration {
    complex: CubicalComplex,
    values: Vec<f64>,
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Filtration {
    pub fn complex(&self) -> &CubicalComplex {
        &self.complex
    }

    /// Cell indices in filtration order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Filtration position of each cell.
    pub fn position(&self, cell: usize) -> usize {
        self.position[cell]
    }

    pub fn value(&self, cell: usize) -> f64 {
        self.values[cell]
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn build_filtration(complex: &CubicalComplex, field: &DensityField) -> Result<Filtration, PersistenceError> {
    let (g, c) = (field.grid(), complex.grid());
    if g.nx != c.nx || g.ny != c.ny {
        return Err(PersistenceError::GridMismatch { field: (g.nx, g.ny), complex: (c.nx, c.ny) });
    }
    let f = field.values();
    let n = complex.num_cells();
    let mut values = Vec::with_capacity(n);
    values.extend_from_slice(f);
    for cell in complex.num_vertices()..n {
        let min = complex
            .face_indices(cell)
            .iter()
            .map(|&face| values[face])
            .fold(f64::INFINITY, f64::min);
        values.push(min);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| compare_cells(complex, &values, a, b));
    let mut position = vec![0; n];
    for (pos, &cell) in order.iter().enumerate() {
        position[cell] = pos;
    }
    Ok(Filtration { complex: complex.clone(), values, order, position })
}

fn compare_cells(complex: &CubicalComplex, values: &[f64], a: usize, b: usize) -> Ordering {
    values[b]
        .total_cmp(&values[a])
        .then_with(|| complex.dim(a).cmp(&complex.dim(b)))
        .then_with(|| a.cmp(&b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    /// Dimension of the birth cell.
    pub dim: u8,
    pub birth: usize,
    /// `None` for essential classes.
    pub death: Option<usize>,
    pub birth_value: f64,
    pub death_value: Option<f64>,
}

impl PersistencePair {
    /// `birth_value - death_value`, or infinity for essential classes.
    pub fn persistence(&self) -> f64 {
        match self.death_value {
            Some(d) => self.birth_value - d,
            None => f64::INFINITY,
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_none()
    }

    pub fn birth_cell(&self, complex: &CubicalComplex) -> Cell {
        complex.cell(self.birth).expect("pair cells belong to the complex")
    }

    pub fn death_cell(&self, complex: &CubicalComplex) -> Option<Cell> {
        self.death.map(|d| complex.cell(d).expect("pair cells belong to the complex"))
    }
}

/// All pairs of a filtration, sorted by the filtration position of the birth
/// cell, with lookups by birth and by death cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pairs: Vec<PersistencePair>,
    by_birth: Vec<Option<u32>>,
    by_death: Vec<Option<u32>>,
}

impl PersistenceDiagram {
    fn from_pairing(filtration: &Filtration, matched: &[(usize, usize)]) -> Result<Self, PersistenceError> {
        let n = filtration.len();
        let mut partner: Vec<Option<usize>> = vec![None; n];
        let mut is_death = vec![false; n];
        for &(b, d) in matched {
            if partner[b].is_some() {
                return Err(PersistenceError::Conflict(b));
            }
            if partner[d].is_some() {
                return Err(PersistenceError::Conflict(d));
            }
            partner[b] = Some(d);
            partner[d] = Some(b);
            is_death[d] = true;
        }
        let complex = filtration.complex();
        let mut pairs = Vec::with_capacity(n - matched.len());
        for &cell in filtration.order() {
            if is_death[cell] {
                continue;
            }
            let death = partner[cell];
            pairs.push(PersistencePair {
                dim: complex.dim(cell),
                birth: cell,
                death,
                birth_value: filtration.value(cell),
                death_value: death.map(|d| filtration.value(d)),
            });
        }
        let mut by_birth = vec![None; n];
        let mut by_death = vec![None; n];
        for (k, p) in pairs.iter().enumerate() {
            by_birth[p.birth] = Some(k as u32);
            if let Some(d) = p.death {
                by_death[d] = Some(k as u32);
            }
        }
        Ok(Self { pairs, by_birth, by_death })
    }

    pub fn pairs(&self) -> &[PersistencePair] {
        &self.pairs
    }

    pub fn finite_pairs(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(|p| !p.is_essential())
    }

    pub fn essential(&self) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(|p| p.is_essential())
    }

    /// Essential class counts by dimension.
    pub fn essential_counts(&self) -> [usize; 3] {
        let mut counts = [0; 3];
        for p in self.essential() {
            counts[p.dim as usize] += 1;
        }
        counts
    }

    pub fn by_birth(&self, cell: usize) -> Option<&PersistencePair> {
        self.by_birth.get(cell).copied().flatten().map(|k| &self.pairs[k as usize])
    }

    pub fn by_death(&self, cell: usize) -> Option<&PersistencePair> {
        self.by_death.get(cell).copied().flatten().map(|k| &self.pairs[k as usize])
    }

    /// Number of cells covered by the diagram.
    pub fn num_cells(&self) -> usize {
        self.by_birth.len()
    }

    /// CSV export; essential classes write `inf` and leave `death_cell` empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth_value,death_value,persistence,birth_cell,death_cell\n");
        for p in &self.pairs {
            match (p.death, p.death_value) {
                (Some(d), Some(dv)) => {
                    let _ = writeln!(out, "{},{},{},{},{},{}", p.dim, p.birth_value, dv, p.persistence(), p.birth, d);
                }
                _ => {
                    let _ = writeln!(out, "{},{},inf,inf,{},", p.dim, p.birth_value, p.birth);
                }
            }
        }
        out
    }
}

/// Persistence pairing of the filtration.
pub fn reduce(filtration: &Filtration) -> Result<PersistenceDiagram, PersistenceError> {
    let complex = filtration.complex();
    let order = filtration.order();
    let nv = complex.num_vertices();
    let mut matched = Vec::new();

    // Vertex/edge pairs: the elder rule. Each component remembers the
    // filtration position of its oldest vertex.
    let mut uf = UnionFind::new(nv);
    let mut oldest: Vec<usize> = (0..nv).map(|v| filtration.position(v)).collect();
    let mut negative = vec![false; complex.num_cells()];
    for &cell in order.iter().filter(|&&c| complex.dim(c) == 1) {
        let f = complex.face_indices(cell);
        let (ra, rb) = (uf.find(f[0]), uf.find(f[1]));
        if ra == rb {
            continue;
        }
        let (old_a, old_b) = (oldest[ra], oldest[rb]);
        let (elder, younger) = if old_a < old_b { (old_a, old_b) } else { (old_b, old_a) };
        matched.push((order[younger], cell));
        negative[cell] = true;
        let root = uf.union(ra, rb).expect("distinct roots");
        oldest[root] = elder;
    }

    // Edge/square pairs: the same sweep on the dual graph, run backwards.
    // Dual node `k` is square `sq0 + k`; the last node is the outer face,
    // which is older than every square.
    let squares = complex.range(2);
    let sq0 = squares.start;
    let outer = squares.len();
    let mut dual = UnionFind::new(outer + 1);
    let mut youngest: Vec<usize> = squares.clone().map(|s| filtration.position(s)).collect();
    youngest.push(usize::MAX);
    for &cell in order.iter().rev().filter(|&&c| complex.dim(c) == 1) {
        let cof = complex.coface_indices(cell);
        let a = cof[0] - sq0;
        let b = if cof.len() == 2 { cof[1] - sq0 } else { outer };
        let (ra, rb) = (dual.find(a), dual.find(b));
        if ra == rb {
            continue;
        }
        if negative[cell] {
            return Err(PersistenceError::Conflict(cell));
        }
        let (key_a, key_b) = (youngest[ra], youngest[rb]);
        let (elder, younger) = if key_a > key_b { (key_a, key_b) } else { (key_b, key_a) };
        matched.push((cell, order[younger]));
        let root = dual.union(ra, rb).expect("distinct roots");
        youngest[root] = elder;
    }

    PersistenceDiagram::from_pairing(filtration, &matched)
}

/// Left-to-right column reduction over Z/2, for cross-checking [`reduce`].
pub fn oracle_reduce(filtration: &Filtration) -> Result<PersistenceDiagram, PersistenceError> {
    let n = filtration.len();
    if n > ORACLE_MAX_CELLS {
        return Err(PersistenceError::OracleTooLarge { cells: n, max: ORACLE_MAX_CELLS });
    }
    let complex = filtration.complex();
    let order = filtration.order();
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut pivot_owner: Vec<Option<usize>> = vec![None; n];
    let mut matched = Vec::new();
    for (j, &cell) in order.iter().enumerate() {
        let mut col: Vec<usize> = complex.face_indices(cell).iter().map(|&f| filtration.position(f)).collect();
        col.sort_unstable();
        while let Some(&low) = col.last() {
            match pivot_owner[low] {
                Some(k) => col = symmetric_difference(&col, &columns[k]),
                None => {
                    pivot_owner[low] = Some(j);
                    matched.push((order[low], cell));
                    break;
                }
            }
        }
        columns.push(col);
    }
    PersistenceDiagram::from_pairing(filtration, &matched)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::GridSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(nx: usize, ny: usize, values: Vec<f64>) -> Filtration {
        let grid = GridSpec::unit(nx, ny).unwrap();
        let complex = CubicalComplex::new(grid).unwrap();
        build_filtration(&complex, &DensityField::new(grid, values).unwrap()).unwrap()
    }

    fn random_filtration(rng: &mut ChaCha8Rng, nx: usize, ny: usize, levels: u32) -> Filtration {
        let values = (0..nx * ny).map(|_| rng.gen_range(0..levels) as f64).collect();
        setup(nx, ny, values)
    }

    #[test]
    fn tie_break_by_dimension() {
        let f = setup(2, 2, vec![5.0, 3.0, 5.0, 3.0]);
        // vertices 0 and 2 at 5, the vertical edge between them also at 5
        let k = f.complex();
        let v_edge_left = k.range(1).start + 2;
        assert_eq!(&f.order()[..3], &[0, 2, v_edge_left]);
        assert_eq!(f.value(v_edge_left), 5.0);
    }

    #[test]
    fn constant_field_orders_by_dimension_then_index() {
        let f = setup(3, 3, vec![1.0; 9]);
        let expect: Vec<usize> = (0..f.len()).collect();
        assert_eq!(f.order(), &expect[..]);
    }

    #[test]
    fn faces_precede_cofaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let f = random_filtration(&mut rng, 6, 6, 5);
            for cell in 0..f.len() {
                for &face in &f.complex().face_indices(cell) {
                    assert!(f.position(face) < f.position(cell));
                }
            }
        }
    }

    #[test]
    fn single_square_hand_computation() {
        // values 9, 8 on the bottom row, 7, 6 on the top row
        let f = setup(2, 2, vec![9.0, 8.0, 7.0, 6.0]);
        let d = reduce(&f).unwrap();
        assert_eq!(d, oracle_reduce(&f).unwrap());
        let k = f.complex();
        let [h_bot, h_top, v_left, v_right] = [4, 5, 6, 7];
        let sq = 8;
        assert_eq!(d.essential_counts(), [1, 0, 0]);
        assert_eq!(d.essential().next().unwrap().birth, 0);
        // filtration: v0(9) v1(8) h_bot(8) v2(7) v_left(7) v3(6) h_top(6) v_right(6) sq(6)
        let pairs: Vec<(usize, Option<usize>)> = d.pairs().iter().map(|p| (p.birth, p.death)).collect();
        assert_eq!(
            pairs,
            vec![(0, None), (1, Some(h_bot)), (2, Some(v_left)), (3, Some(h_top)), (v_right, Some(sq))]
        );
        assert_eq!(d.by_death(sq).unwrap().persistence(), 0.0);
        assert_eq!(d.by_birth(1).unwrap().persistence(), 0.0);
        assert!(d.finite_pairs().all(|p| p.persistence() == 0.0));
        assert_eq!(k.num_cells(), 9);
    }

    #[test]
    fn constant_field_has_only_zero_persistence() {
        let f = setup(5, 4, vec![2.5; 20]);
        let d = reduce(&f).unwrap();
        assert_eq!(d.essential_counts(), [1, 0, 0]);
        assert!(d.finite_pairs().all(|p| p.persistence() == 0.0));
        assert_eq!(d, oracle_reduce(&f).unwrap());
    }

    #[test]
    fn noiseless_cycle_has_one_loop_pair() {
        use crate::density::{synth_density, NoiseParams, PlanarGraph};
        use crate::geom::Point;
        let p = Point::new;
        let g = PlanarGraph::straight(
            vec![p(11.5, 4.0), p(19.5, 12.0), p(11.5, 20.0), p(3.5, 12.0)],
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
        )
        .unwrap();
        let params = NoiseParams::new(2.0, 10.0, 4.0, 0.0).unwrap();
        let grid = GridSpec::unit(24, 24).unwrap();
        let field = synth_density(&g, &params, &grid, 0).unwrap();
        let f = build_filtration(&CubicalComplex::new(grid).unwrap(), &field).unwrap();
        let d = reduce(&f).unwrap();
        assert_eq!(d, oracle_reduce(&f).unwrap());
        assert_eq!(d.essential_counts(), [1, 0, 0]);
        assert_eq!(d.essential().next().unwrap().birth_value, 10.0);
        let positive: Vec<(u8, f64)> =
            d.finite_pairs().filter(|p| p.persistence() > 0.0).map(|p| (p.dim, p.persistence())).collect();
        assert_eq!(positive.iter().filter(|&&x| x == (0, 6.0)).count(), 3);
        assert_eq!(positive.iter().filter(|&&x| x == (1, 4.0)).count(), 1);
        assert_eq!(positive.len(), 4);
    }

    #[test]
    fn matches_oracle_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for round in 0..100 {
            let nx = 4 + round % 5;
            let ny = 4 + (round / 5) % 5;
            // few levels means many ties
            let levels = if round % 2 == 0 { 3 } else { 1000 };
            let f = random_filtration(&mut rng, nx, ny, levels);
            let fast = reduce(&f).unwrap();
            let slow = oracle_reduce(&f).unwrap();
            assert_eq!(fast, slow, "round {round}");
            let finite = fast.finite_pairs().count();
            let essential = fast.essential().count();
            assert_eq!(2 * finite + essential, f.len());
            assert_eq!(fast.essential_counts(), [1, 0, 0]);
            for p in fast.finite_pairs() {
                assert!(p.persistence() >= 0.0);
                assert_eq!(f.complex().dim(p.death.unwrap()), p.dim + 1);
            }
        }
    }

    #[test]
    fn distinct_values_make_tie_break_irrelevant() {
        // With all vertex values distinct, only face/coface ties remain and the
        // pairing is the same whatever index order is used among equal cells.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..36).map(|_| rng.gen::<f64>()).collect();
        let f = setup(6, 6, values.clone());
        let d = oracle_reduce(&f).unwrap();
        // mirror the grid: same field, permuted dense indices
        let mirrored: Vec<f64> = (0..36).map(|k| values[(k / 6) * 6 + (5 - k % 6)]).collect();
        let fm = setup(6, 6, mirrored);
        let dm = oracle_reduce(&fm).unwrap();
        let mut a: Vec<(u64, u64)> = d.finite_pairs().map(|p| (p.birth_value.to_bits(), p.death_value.unwrap().to_bits())).collect();
        let mut b: Vec<(u64, u64)> = dm.finite_pairs().map(|p| (p.birth_value.to_bits(), p.death_value.unwrap().to_bits())).collect();
        a.sort_unstable();
        b.sort_unstable();
        assert_eq!(a, b);
    }

    #[test]
    fn stability_under_small_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let eps = 1e-3;
        for _ in 0..10 {
            let values: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..10.0)).collect();
            let perturbed: Vec<f64> =
                values.iter().map(|v| v + rng.gen_range(-eps..eps)).map(|v: f64| v.max(0.0)).collect();
            let (a, b) = (setup(8, 8, values), setup(8, 8, perturbed));
            let (da, db) = (reduce(&a).unwrap(), reduce(&b).unwrap());
            // every significant pair has a partner within eps in both coordinates
            for p in da.finite_pairs().filter(|p| p.persistence() > 4.0 * eps) {
                let close = db.finite_pairs().any(|q| {
                    q.dim == p.dim
                        && (q.birth_value - p.birth_value).abs() <= eps
                        && (q.death_value.unwrap() - p.death_value.unwrap()).abs() <= eps
                        && (q.persistence() - p.persistence()).abs() <= 2.0 * eps
                });
                assert!(close, "{p:?} has no nearby pair");
            }
        }
    }

    #[test]
    fn oracle_refuses_large_complexes() {
        let f = setup(120, 120, vec![0.0; 14400]);
        assert!(matches!(oracle_reduce(&f), Err(PersistenceError::OracleTooLarge { .. })));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let complex = CubicalComplex::new(GridSpec::unit(3, 3).unwrap()).unwrap();
        let field = DensityField::zeros(GridSpec::unit(3, 4).unwrap());
        assert!(matches!(build_filtration(&complex, &field), Err(PersistenceError::GridMismatch { .. })));
    }

    #[test]
    fn csv_writes_inf_for_essential() {
        let f = setup(2, 2, vec![9.0, 8.0, 7.0, 6.0]);
        let csv = reduce(&f).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("dim,birth_value,death_value,persistence,birth_cell,death_cell"));
        assert_eq!(lines.next(), Some("0,9,inf,inf,0,"));
        assert_eq!(lines.next(), Some("0,8,8,0,1,4"));
    }
}
