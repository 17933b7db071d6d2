//! Two-dimensional cubical complex over a regular grid of pixels.
//!
//! Cells are addressed either structurally ([`Cell`]) or by a dense index in
//! `0..num_cells()`. The dense layout is: all vertices, then horizontal edges,
//! then vertical edges, then squares, each block in row-major order (row 0 is
//! the lowest `y`). All incidence queries are O(1) index arithmetic.

use arrayvec::ArrayVec;
use thiserror::Error;

use crate::geom::Point;

#[derive(Debug, Error, PartialEq)]
pub enum ComplexError {
    #[error("grid needs at least 2 vertices along {axis}, got {got}")]
    TooFewVertices { axis: char, got: usize },
    #[error("grid spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("grid origin must be finite")]
    BadOrigin,
    #[error("cell {0:?} is outside the complex")]
    CellOutOfRange(Cell),
    #[error("dense index {index} is outside 0..{len}")]
    IndexOutOfRange { index: usize, len: usize },
}

/// Placement of the vertex lattice in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub origin: Point,
    pub spacing: f64,
}

impl GridSpec {
    pub fn new(nx: usize, ny: usize, origin: Point, spacing: f64) -> Result<Self, ComplexError> {
        let grid = Self { nx, ny, origin, spacing };
        grid.validate()?;
        Ok(grid)
    }

    /// Unit spacing, origin at zero.
    pub fn unit(nx: usize, ny: usize) -> Result<Self, ComplexError> {
        Self::new(nx, ny, Point::new(0.0, 0.0), 1.0)
    }

    pub fn validate(&self) -> Result<(), ComplexError> {
        if self.nx < 2 {
            return Err(ComplexError::TooFewVertices { axis: 'x', got: self.nx });
        }
        if self.ny < 2 {
            return Err(ComplexError::TooFewVertices { axis: 'y', got: self.ny });
        }
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(ComplexError::BadSpacing(self.spacing));
        }
        if !(self.origin.x.is_finite() && self.origin.y.is_finite()) {
            return Err(ComplexError::BadOrigin);
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.nx * self.ny
    }

    /// World coordinates of lattice vertex `(i, j)`.
    pub fn world(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + self.spacing * i as f64,
            self.origin.y + self.spacing * j as f64,
        )
    }

    /// Upper corner of the rectangle covered by the grid.
    pub fn max_corner(&self) -> Point {
        self.world(self.nx - 1, self.ny - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A cell of the complex, anchored at its lowest-coordinate vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Vertex { i: usize, j: usize },
    Edge { i: usize, j: usize, orientation: Orientation },
    Square { i: usize, j: usize },
}

impl Cell {
    pub fn dim(&self) -> u8 {
        match self {
            Cell::Vertex { .. } => 0,
            Cell::Edge { .. } => 1,
            Cell::Square { .. } => 2,
        }
    }

    pub fn anchor(&self) -> (usize, usize) {
        match *self {
            Cell::Vertex { i, j } | Cell::Edge { i, j, .. } | Cell::Square { i, j } => (i, j),
        }
    }
}

/// At most four faces or cofaces per cell.
pub type Incidence = ArrayVec<usize, 4>;

#[derive(Debug, Clone, PartialEq)]
pub struct CubicalComplex {
    grid: GridSpec,
    h_offset: usize,
    v_offset: usize,
    sq_offset: usize,
    len: usize,
}

impl CubicalComplex {
    pub fn new(grid: GridSpec) -> Result<Self, ComplexError> {
        grid.validate()?;
        let (nx, ny) = (grid.nx, grid.ny);
        let h_offset = nx * ny;
        let v_offset = h_offset + (nx - 1) * ny;
        let sq_offset = v_offset + nx * (ny - 1);
        let len = sq_offset + (nx - 1) * (ny - 1);
        Ok(Self { grid, h_offset, v_offset, sq_offset, len })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn num_cells(&self) -> usize {
        self.len
    }

    pub fn num_vertices(&self) -> usize {
        self.h_offset
    }

    pub fn num_edges(&self) -> usize {
        self.sq_offset - self.h_offset
    }

    pub fn num_squares(&self) -> usize {
        self.len - self.sq_offset
    }

    /// Counts of cells by dimension.
    pub fn counts(&self) -> [usize; 3] {
        [self.num_vertices(), self.num_edges(), self.num_squares()]
    }

    pub fn euler_characteristic(&self) -> i64 {
        let [v, e, f] = self.counts();
        v as i64 - e as i64 + f as i64
    }

    pub fn dim(&self, index: usize) -> u8 {
        debug_assert!(index < self.len);
        if index < self.h_offset {
            0
        } else if index < self.sq_offset {
            1
        } else {
            2
        }
    }

    /// Dense index range of the cells of dimension `dim`.
    pub fn range(&self, dim: u8) -> std::ops::Range<usize> {
        match dim {
            0 => 0..self.h_offset,
            1 => self.h_offset..self.sq_offset,
            2 => self.sq_offset..self.len,
            _ => self.len..self.len,
        }
    }

    pub fn vertex_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.grid.nx && j < self.grid.ny);
        j * self.grid.nx + i
    }

    pub fn index(&self, cell: &Cell) -> Result<usize, ComplexError> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let out = || ComplexError::CellOutOfRange(*cell);
        match *cell {
            Cell::Vertex { i, j } => {
                if i < nx && j < ny {
                    Ok(j * nx + i)
                } else {
                    Err(out())
                }
            }
            Cell::Edge { i, j, orientation: Orientation::Horizontal } => {
                if i + 1 < nx && j < ny {
                    Ok(self.h_offset + j * (nx - 1) + i)
                } else {
                    Err(out())
                }
            }
            Cell::Edge { i, j, orientation: Orientation::Vertical } => {
                if i < nx && j + 1 < ny {
                    Ok(self.v_offset + j * nx + i)
                } else {
                    Err(out())
                }
            }
            Cell::Square { i, j } => {
                if i + 1 < nx && j + 1 < ny {
                    Ok(self.sq_offset + j * (nx - 1) + i)
                } else {
                    Err(out())
                }
            }
        }
    }

    pub fn cell(&self, index: usize) -> Result<Cell, ComplexError> {
        if index >= self.len {
            return Err(ComplexError::IndexOutOfRange { index, len: self.len });
        }
        let nx = self.grid.nx;
        Ok(if index < self.h_offset {
            Cell::Vertex { i: index % nx, j: index / nx }
        } else if index < self.v_offset {
            let k = index - self.h_offset;
            Cell::Edge { i: k % (nx - 1), j: k / (nx - 1), orientation: Orientation::Horizontal }
        } else if index < self.sq_offset {
            let k = index - self.v_offset;
            Cell::Edge { i: k % nx, j: k / nx, orientation: Orientation::Vertical }
        } else {
            let k = index - self.sq_offset;
            Cell::Square { i: k % (nx - 1), j: k / (nx - 1) }
        })
    }

    /// Faces by dense index, ascending.
    pub fn face_indices(&self, index: usize) -> Incidence {
        let nx = self.grid.nx;
        let mut out = Incidence::new();
        if index < self.h_offset {
            // vertices have no faces
        } else if index < self.v_offset {
            let k = index - self.h_offset;
            let (i, j) = (k % (nx - 1), k / (nx - 1));
            let v = j * nx + i;
            out.push(v);
            out.push(v + 1);
        } else if index < self.sq_offset {
            let v = index - self.v_offset;
            out.push(v);
            out.push(v + nx);
        } else {
            let k = index - self.sq_offset;
            let (i, j) = (k % (nx - 1), k / (nx - 1));
            out.push(self.h_offset + j * (nx - 1) + i);
            out.push(self.h_offset + (j + 1) * (nx - 1) + i);
            out.push(self.v_offset + j * nx + i);
            out.push(self.v_offset + j * nx + i + 1);
        }
        out
    }

    /// Cofaces by dense index, ascending.
    pub fn coface_indices(&self, index: usize) -> Incidence {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let mut out = Incidence::new();
        if index < self.h_offset {
            let (i, j) = (index % nx, index / nx);
            if i > 0 {
                out.push(self.h_offset + j * (nx - 1) + i - 1);
            }
            if i + 1 < nx {
                out.push(self.h_offset + j * (nx - 1) + i);
            }
            if j > 0 {
                out.push(self.v_offset + (j - 1) * nx + i);
            }
            if j + 1 < ny {
                out.push(self.v_offset + j * nx + i);
            }
        } else if index < self.v_offset {
            let k = index - self.h_offset;
            let (i, j) = (k % (nx - 1), k / (nx - 1));
            if j > 0 {
                out.push(self.sq_offset + (j - 1) * (nx - 1) + i);
            }
            if j + 1 < ny {
                out.push(self.sq_offset + j * (nx - 1) + i);
            }
        } else if index < self.sq_offset {
            let k = index - self.v_offset;
            let (i, j) = (k % nx, k / nx);
            if i > 0 {
                out.push(self.sq_offset + j * (nx - 1) + i - 1);
            }
            if i + 1 < nx {
                out.push(self.sq_offset + j * (nx - 1) + i);
            }
        }
        out
    }

    pub fn faces(&self, cell: &Cell) -> Result<Vec<Cell>, ComplexError> {
        let index = self.index(cell)?;
        Ok(self.face_indices(index).iter().map(|&f| self.cell_unchecked(f)).collect())
    }

    pub fn cofaces(&self, cell: &Cell) -> Result<Vec<Cell>, ComplexError> {
        let index = self.index(cell)?;
        Ok(self.coface_indices(index).iter().map(|&f| self.cell_unchecked(f)).collect())
    }

    fn cell_unchecked(&self, index: usize) -> Cell {
        self.cell(index).expect("incidence produced an in-range index")
    }

    /// The endpoint of edge `edge` that is not `vertex`.
    pub fn other_endpoint(&self, edge: usize, vertex: usize) -> usize {
        let f = self.face_indices(edge);
        if f[0] == vertex {
            f[1]
        } else {
            f[0]
        }
    }

    /// The square on the other side of `edge` from `square`, if any.
    pub fn other_coface(&self, edge: usize, square: usize) -> Option<usize> {
        self.coface_indices(edge).into_iter().find(|&s| s != square)
    }

    /// World coordinates of a vertex cell.
    pub fn vertex_point(&self, vertex: usize) -> Point {
        let nx = self.grid.nx;
        self.grid.world(vertex % nx, vertex / nx)
    }
}
