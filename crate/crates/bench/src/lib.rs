//! Shared setup for the criterion benches.

use dmgraph::fixtures::{standard_grid, standard_params, Family};
use dmgraph::{build_filtration, CubicalComplex, DensityField, PersistenceDiagram};

/// Synthetic density of a fixture at the standard parameters.
pub fn fixture_density(family: Family, seed: u64) -> DensityField {
    dmgraph::synth_density(&family.graph(), &standard_params(), &standard_grid(), seed).expect("valid fixture")
}

/// Complex and diagram of the fixture density, ready for simplification.
pub fn fixture_diagram(family: Family, seed: u64) -> (CubicalComplex, PersistenceDiagram) {
    let density = fixture_density(family, seed);
    let complex = CubicalComplex::new(*density.grid()).expect("valid grid");
    let diagram = dmgraph::reduce(&build_filtration(&complex, &density).expect("filtration")).expect("reduce");
    (complex, diagram)
}
