//! Synthetic ground-truth graphs on a 96x96 unit grid.
//!
//! Vertices sit on half-integer x so that no pixel centre lies exactly on a
//! region boundary, and edges are vertical or at 45 degrees, which keeps
//! every pixel of an edge tube well inside distance `omega` of the edge.

use crate::complex::GridSpec;
use crate::density::{NoiseParams, PlanarGraph};
use crate::geom::Point;

pub const GRID_SIZE: usize = 96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Path,
    Star,
    Cycle,
    Theta,
    CycleWithHairs,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Path, Family::Star, Family::Cycle, Family::Theta, Family::CycleWithHairs];

    pub fn name(self) -> &'static str {
        match self {
            Family::Path => "path",
            Family::Star => "star",
            Family::Cycle => "cycle",
            Family::Theta => "theta",
            Family::CycleWithHairs => "cycle-hairs",
        }
    }

    pub fn from_name(name: &str) -> Option<Family> {
        Family::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn graph(self) -> PlanarGraph {
        let p = Point::new;
        let diamond = vec![p(48.5, 15.0), p(78.5, 45.0), p(48.5, 75.0), p(18.5, 45.0)];
        let ring = [(0, 1), (1, 2), (2, 3), (3, 0)];
        let (vertices, edges): (Vec<Point>, Vec<(usize, usize)>) = match self {
            Family::Path => (vec![p(40.5, 20.0), p(40.5, 75.0)], vec![(0, 1)]),
            Family::Star => (
                vec![p(48.5, 40.0), p(48.5, 80.0), p(18.5, 10.0), p(78.5, 10.0)],
                vec![(0, 1), (0, 2), (0, 3)],
            ),
            Family::Cycle => (diamond, ring.to_vec()),
            // vertical chord between two lobes, every corner a right angle
            Family::Theta => (
                vec![
                    p(48.5, 60.0),
                    p(48.5, 30.0),
                    p(38.5, 70.0),
                    p(13.5, 45.0),
                    p(38.5, 20.0),
                    p(58.5, 70.0),
                    p(83.5, 45.0),
                    p(58.5, 20.0),
                ],
                vec![(0, 1), (0, 2), (2, 3), (3, 4), (4, 1), (0, 5), (5, 6), (6, 7), (7, 1)],
            ),
            Family::CycleWithHairs => {
                let mut v = diamond;
                v.extend([p(48.5, 88.0), p(48.5, 6.0)]);
                (v, [&ring[..], &[(2, 4), (0, 5)]].concat())
            }
        };
        PlanarGraph::straight(vertices, &edges).expect("fixture graphs are valid")
    }
}

pub fn standard_grid() -> GridSpec {
    GridSpec::unit(GRID_SIZE, GRID_SIZE).expect("valid grid")
}

/// omega = 3 spacings, beta1 = 10, beta2 = 4, nu = 1.
pub fn standard_params() -> NoiseParams {
    NoiseParams::new(3.0, 10.0, 4.0, 1.0).expect("valid parameters")
}

/// Midpoint of the valid cut-off interval for [`standard_params`].
pub fn standard_delta() -> f64 {
    let (lo, hi) = standard_params().delta_range();
    (lo + hi) / 2.0
}
