use std::collections::HashMap;

use crate::complex::Complex;
use crate::cube::{Cube, Edge, Square, Vertex};
use crate::error::{Error, Result};

/// Cellular chain complex of a cubical 2-complex inside the n-cube.
///
/// Orientation: edge `(d, b)` has boundary `(b + 2^d) - b`; square `({i, j}, b)`
/// has boundary `+(i, b) + (j, b + 2^i) - (i, b + 2^j) - (j, b)`, i.e. its
/// [`Square::edges`] with signs `+ + - -`.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    n: u32,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    /// Squares in base-major order: by base vertex, then star pair.
    squares: Vec<Square>,
    /// `[tail, head]` local vertex ids per edge.
    d1: Vec<[u32; 2]>,
    /// Local edge ids per square, in `Square::edges` order.
    d2: Vec<[u32; 4]>,
}

pub const SQUARE_SIGNS: [i64; 4] = [1, 1, -1, -1];

impl ChainComplex {
    /// Full 1-skeleton of the cube plus the complex's squares.
    pub fn from_complex(c: &Complex) -> Self {
        let cube = c.cube();
        let n = cube.n();
        let vertices: Vec<Vertex> = (0..1u32 << n).collect();
        let edges: Vec<Edge> = cube.edges().collect();
        let d1 = edges.iter().map(|e| [e.base, e.head()]).collect();
        let mut squares = Vec::with_capacity(c.face_count());
        for base in 0..1u32 << n {
            for rank in 0..cube.num_pairs() {
                let (i, j) = cube.pair(rank);
                if base & ((1 << i) | (1 << j)) != 0 {
                    continue;
                }
                let s = Square { i, j, base };
                if c.contains(&s) {
                    squares.push(s);
                }
            }
        }
        let d2 = squares
            .iter()
            .map(|s| s.edges().map(|e| cube.edge_index(&e) as u32))
            .collect();
        ChainComplex {
            n,
            vertices,
            edges,
            squares,
            d1,
            d2,
        }
    }

    /// The subcomplex generated by `squares` and `extra_edges` (with all their faces).
    pub fn from_cells(n: u32, squares: &[Square], extra_edges: &[Edge]) -> Result<Self> {
        let cube = Cube::new(n)?;
        let mut squares: Vec<Square> = squares
            .iter()
            .map(|s| Square::new(s.i, s.j, s.base, n))
            .collect::<Result<_>>()?;
        squares.sort_by_key(|s| (s.base, cube.pair_rank(s.i, s.j)));
        squares.dedup();
        let mut edges: Vec<Edge> = squares.iter().flat_map(|s| s.edges()).collect();
        for e in extra_edges {
            edges.push(Edge::new(e.dir, e.base, n)?);
        }
        edges.sort_by_key(|e| cube.edge_index(e));
        edges.dedup();
        let mut vertices: Vec<Vertex> = edges.iter().flat_map(|e| [e.base, e.head()]).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let vid = |v: Vertex| vertices.binary_search(&v).expect("vertex of an edge") as u32;
        let d1 = edges.iter().map(|e| [vid(e.base), vid(e.head())]).collect();
        let eid: HashMap<Edge, u32> = edges.iter().enumerate().map(|(k, e)| (*e, k as u32)).collect();
        let d2 = squares.iter().map(|s| s.edges().map(|e| eid[&e])).collect();
        Ok(ChainComplex {
            n,
            vertices,
            edges,
            squares,
            d1,
            d2,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_squares(&self) -> usize {
        self.squares.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn squares(&self) -> &[Square] {
        &self.squares
    }

    pub fn d1(&self) -> &[[u32; 2]] {
        &self.d1
    }

    pub fn d2(&self) -> &[[u32; 4]] {
        &self.d2
    }

    /// Signed boundary of square `k` as `(edge, coefficient)` pairs.
    pub fn square_boundary(&self, k: usize) -> [(u32, i64); 4] {
        let cols = self.d2[k];
        [0, 1, 2, 3].map(|t| (cols[t], SQUARE_SIGNS[t]))
    }

    /// Checks that the boundary of every square's boundary vanishes over the integers.
    pub fn verify(&self) -> Result<()> {
        let mut acc: HashMap<u32, i64> = HashMap::new();
        for k in 0..self.squares.len() {
            acc.clear();
            for (e, sign) in self.square_boundary(k) {
                let [tail, head] = self.d1[e as usize];
                *acc.entry(head).or_default() += sign;
                *acc.entry(tail).or_default() -= sign;
            }
            if acc.values().any(|&v| v != 0) {
                return Err(Error::Argument(format!(
                    "boundary of boundary nonzero on square {:?}",
                    self.squares[k]
                )));
            }
        }
        Ok(())
    }
}
