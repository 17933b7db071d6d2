//! Density in, reconstructed graph out.

use crate::complex::CubicalComplex;
use crate::density::DensityField;
use crate::extraction::{extract_graph, ReconstructedGraph};
use crate::morse::{simplify, DiscreteVectorField};
use crate::persistence::{build_filtration, reduce, PersistenceDiagram};
use crate::Error;

/// Everything the reconstruction produced, kept for inspection.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub diagram: PersistenceDiagram,
    pub field: DiscreteVectorField,
    pub graph: ReconstructedGraph,
}

impl Reconstruction {
    pub fn complex(&self) -> &CubicalComplex {
        self.field.complex()
    }
}

pub fn reconstruct(density: &DensityField, delta: f64) -> Result<Reconstruction, Error> {
    let complex = CubicalComplex::new(*density.grid())?;
    let filtration = build_filtration(&complex, density)?;
    let diagram = reduce(&filtration)?;
    let field = simplify(DiscreteVectorField::trivial(&complex), &diagram, delta)?;
    let graph = extract_graph(&field, &diagram, delta)?;
    Ok(Reconstruction { diagram, field, graph })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::synth_density;
    use crate::extraction::{graph_stats, EdgeSource};
    use crate::fixtures::{standard_delta, standard_grid, standard_params, Family};
    use crate::verify::check_theorem;

    #[test]
    fn cycle_fixture_end_to_end() {
        let g = Family::Cycle.graph();
        let density = synth_density(&g, &standard_params(), &standard_grid(), 1).unwrap();
        let r = reconstruct(&density, standard_delta()).unwrap();
        let s = graph_stats(&r.graph);
        assert_eq!((s.nodes, s.edges, s.b0, s.b1), (4, 4, 1, 1));
        assert_eq!(r.graph.edges.iter().filter(|e| e.source == EdgeSource::EdgeSquare).count(), 1);
        assert!(r.field.is_acyclic());
        let report = check_theorem(&g, &r.graph, 3.0, 0.25).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn rejects_bad_delta() {
        let density = DensityField::zeros(crate::complex::GridSpec::unit(4, 4).unwrap());
        assert!(matches!(reconstruct(&density, -1.0), Err(Error::Morse(_))));
        let empty = reconstruct(&density, 1.0).unwrap();
        assert!(empty.graph.is_empty());
    }
}
