//! Combinatorics of the n-cube: vertices, edges, squares and general faces in
//! star notation, with canonical integer indices for each dimension.
//!
//! Coordinate `k` of a binary n-tuple is bit `k` of a [`Vertex`], so the first
//! coordinate is the least significant bit. A face is written as a star mask
//! (the free coordinates) plus a base vertex holding the fixed coordinates, with
//! every star bit of the base cleared.
//!
//! Canonical indices:
//!
//! * vertex `v` has index `v`;
//! * edge `(dir, base)` has index `dir * 2^(n-1) + squash(base, {dir})`;
//! * square `({i, j}, base)` has index `pair_rank(i, j) * 2^(n-2) + squash(base, {i, j})`,
//!   where `pair_rank` is the lexicographic rank of `(i, j)` among pairs `i < j`;
//! * a k-face generalizes the same layout with the lexicographic rank of its star set.
//!
//! `squash` deletes the given bit positions and closes the gaps, keeping the
//! remaining bits in low-to-high order. These definitions fix the `.qcx` layout.

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: u32 = 24;

pub type Vertex = u32;

/// A 1-face: the segment from `base` to `base + 2^dir`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub dir: u32,
    pub base: Vertex,
}

/// A 4-cycle (potential 2-face) with stars at coordinates `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Square {
    pub i: u32,
    pub j: u32,
    pub base: Vertex,
}

/// A face of arbitrary dimension: stars are a bit mask of free coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Face {
    pub stars: u32,
    pub base: Vertex,
}

#[inline]
fn low_mask(k: u32) -> u32 {
    if k >= 32 {
        u32::MAX
    } else {
        (1u32 << k) - 1
    }
}

/// Deletes the bits of `v` at the positions set in `positions`.
pub fn squash(v: u32, positions: u32) -> u32 {
    let mut out = v;
    let mut rest = positions;
    // Highest positions first so lower positions stay valid.
    while rest != 0 {
        let k = 31 - rest.leading_zeros();
        rest &= !(1 << k);
        out = (out & low_mask(k)) | ((out >> 1) & !low_mask(k));
    }
    out
}

/// Inverse of [`squash`]: spreads `v` out, inserting zero bits at `positions`.
pub fn unsquash(v: u32, positions: u32) -> u32 {
    let mut out = v;
    let mut rest = positions;
    while rest != 0 {
        let k = rest.trailing_zeros();
        rest &= rest - 1;
        out = (out & low_mask(k)) | ((out & !low_mask(k)) << 1);
    }
    out
}

#[inline]
fn squash_one(v: u32, k: u32) -> u32 {
    (v & low_mask(k)) | ((v >> 1) & !low_mask(k))
}

#[inline]
fn unsquash_one(v: u32, k: u32) -> u32 {
    (v & low_mask(k)) | ((v & !low_mask(k)) << 1)
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for t in 0..k {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

impl Edge {
    pub fn new(dir: u32, base: Vertex, n: u32) -> Result<Self> {
        if dir >= n || base >> n != 0 || (base >> dir) & 1 != 0 {
            return arg_err(format!("invalid edge dir={dir} base={base:#b} in n={n}"));
        }
        Ok(Edge { dir, base })
    }

    pub fn head(&self) -> Vertex {
        self.base | (1 << self.dir)
    }

    pub fn as_face(&self) -> Face {
        Face {
            stars: 1 << self.dir,
            base: self.base,
        }
    }
}

impl Square {
    /// Builds a square from two star coordinates in either order.
    pub fn new(a: u32, b: u32, base: Vertex, n: u32) -> Result<Self> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        if i == j || j >= n || base >> n != 0 || base & ((1 << i) | (1 << j)) != 0 {
            return arg_err(format!("invalid square stars=({a},{b}) base={base:#b} in n={n}"));
        }
        Ok(Square { i, j, base })
    }

    /// Unchecked constructor for coordinates known to be distinct and clear in `base`.
    #[inline]
    pub(crate) fn from_pair(a: u32, b: u32, base: Vertex) -> Self {
        if a < b {
            Square { i: a, j: b, base }
        } else {
            Square { i: b, j: a, base }
        }
    }

    pub fn stars(&self) -> u32 {
        (1 << self.i) | (1 << self.j)
    }

    pub fn as_face(&self) -> Face {
        Face {
            stars: self.stars(),
            base: self.base,
        }
    }

    /// Boundary edges in cyclic order: `(i,b)`, `(j,b+2^i)`, `(i,b+2^j)`, `(j,b)`.
    #[inline]
    pub fn edges(&self) -> [Edge; 4] {
        let b = self.base;
        [
            Edge { dir: self.i, base: b },
            Edge { dir: self.j, base: b | (1 << self.i) },
            Edge { dir: self.i, base: b | (1 << self.j) },
            Edge { dir: self.j, base: b },
        ]
    }

    pub fn vertices(&self) -> [Vertex; 4] {
        let b = self.base;
        [b, b | (1 << self.i), b | (1 << self.i) | (1 << self.j), b | (1 << self.j)]
    }
}

impl Face {
    pub fn new(stars: u32, base: Vertex, n: u32) -> Result<Self> {
        if (stars | base) >> n != 0 || stars & base != 0 {
            return arg_err(format!("invalid face stars={stars:#b} base={base:#b} in n={n}"));
        }
        Ok(Face { stars, base })
    }

    pub fn vertex(v: Vertex) -> Self {
        Face { stars: 0, base: v }
    }

    pub fn dim(&self) -> u32 {
        self.stars.count_ones()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v & !self.stars == self.base
    }

    pub fn contains_face(&self, other: &Face) -> bool {
        other.stars & !self.stars == 0 && self.contains_vertex(other.base)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.contains_face(&e.as_face())
    }

    pub fn contains_square(&self, s: &Square) -> bool {
        self.contains_face(&s.as_face())
    }

    pub fn as_square(&self) -> Option<Square> {
        if self.dim() != 2 {
            return None;
        }
        let i = self.stars.trailing_zeros();
        let j = 31 - self.stars.leading_zeros();
        Some(Square { i, j, base: self.base })
    }

    /// All vertices of the face, in increasing order of their star-subset.
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        let k = self.dim();
        (0u32..(1 << k)).map(move |sub| self.base | unsquash_into(sub, self.stars))
    }

    /// All edges of the face.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        let mut rest = self.stars;
        while rest != 0 {
            let d = rest.trailing_zeros();
            rest &= rest - 1;
            let sub = Face {
                stars: self.stars & !(1 << d),
                base: self.base,
            };
            out.extend(sub.vertices().map(|b| Edge { dir: d, base: b }));
        }
        out
    }

    /// All squares (2-faces) of the face.
    pub fn squares(&self) -> Vec<Square> {
        let mut out = Vec::new();
        let coords: Vec<u32> = (0..32).filter(|k| self.stars >> k & 1 == 1).collect();
        for (a, &i) in coords.iter().enumerate() {
            for &j in &coords[a + 1..] {
                let sub = Face {
                    stars: self.stars & !(1 << i) & !(1 << j),
                    base: self.base,
                };
                out.extend(sub.vertices().map(|b| Square { i, j, base: b }));
            }
        }
        out
    }
}

/// Places the low bits of `v` into the set positions of `mask`, in order.
fn unsquash_into(v: u32, mask: u32) -> u32 {
    let mut out = 0;
    let mut rest = mask;
    let mut t = 0;
    while rest != 0 {
        let k = rest.trailing_zeros();
        rest &= rest - 1;
        out |= ((v >> t) & 1) << k;
        t += 1;
    }
    out
}

/// Smallest face containing all `faces`.
pub fn box_span(faces: &[Face]) -> Result<Face> {
    let Some(first) = faces.first() else {
        return arg_err("box-span of an empty collection");
    };
    let mut stars = 0;
    let mut diff = 0;
    for f in faces {
        stars |= f.stars;
        diff |= f.base ^ first.base;
    }
    stars |= diff;
    Ok(Face {
        stars,
        base: first.base & !stars,
    })
}

/// The ambient n-cube, with the tables needed for O(1) index arithmetic.
#[derive(Clone, Debug)]
pub struct Cube {
    n: u32,
    /// `pair_offset[i]` = rank of the pair `(i, i + 1)`.
    pair_offset: Vec<u32>,
    pairs: Vec<(u32, u32)>,
}

impl Cube {
    pub fn new(n: u32) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return arg_err(format!("dimension n={n} outside 1..={MAX_DIM}"));
        }
        let mut pair_offset = Vec::with_capacity(n as usize);
        let mut pairs = Vec::new();
        for i in 0..n {
            pair_offset.push(pairs.len() as u32);
            for j in i + 1..n {
                pairs.push((i, j));
            }
        }
        Ok(Cube {
            n,
            pair_offset,
            pairs,
        })
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn num_vertices(&self) -> usize {
        1 << self.n
    }

    pub fn num_edges(&self) -> usize {
        (self.n as usize) << (self.n - 1)
    }

    /// `2^(n-3) n (n-1)`, written to stay exact for n < 3.
    pub fn num_squares(&self) -> usize {
        if self.n < 2 {
            return 0;
        }
        self.pairs.len() << (self.n - 2)
    }

    /// Number of k-faces: `C(n, k) 2^(n-k)`.
    pub fn num_faces(&self, k: u32) -> u64 {
        if k > self.n {
            return 0;
        }
        binomial(self.n as u64, k as u64) << (self.n - k)
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    #[inline]
    pub fn pair_rank(&self, i: u32, j: u32) -> usize {
        debug_assert!(i < j && j < self.n);
        (self.pair_offset[i as usize] + (j - i - 1)) as usize
    }

    pub fn pair(&self, rank: usize) -> (u32, u32) {
        self.pairs[rank]
    }

    #[inline]
    pub fn edge_index(&self, e: &Edge) -> usize {
        ((e.dir as usize) << (self.n - 1)) | squash_one(e.base, e.dir) as usize
    }

    pub fn edge_at(&self, index: usize) -> Result<Edge> {
        if index >= self.num_edges() {
            return Err(Error::Range {
                index: index as u64,
                count: self.num_edges() as u64,
            });
        }
        let dir = (index >> (self.n - 1)) as u32;
        let rest = (index & ((1 << (self.n - 1)) - 1)) as u32;
        Ok(Edge {
            dir,
            base: unsquash_one(rest, dir),
        })
    }

    #[inline]
    pub fn square_index(&self, s: &Square) -> usize {
        let rest = squash_one(squash_one(s.base, s.j), s.i);
        (self.pair_rank(s.i, s.j) << (self.n - 2)) | rest as usize
    }

    pub fn square_at(&self, index: usize) -> Result<Square> {
        if index >= self.num_squares() {
            return Err(Error::Range {
                index: index as u64,
                count: self.num_squares() as u64,
            });
        }
        Ok(self.square_at_unchecked(index))
    }

    #[inline]
    pub(crate) fn square_at_unchecked(&self, index: usize) -> Square {
        let (i, j) = self.pairs[index >> (self.n - 2)];
        let rest = (index & ((1 << (self.n - 2)) - 1)) as u32;
        Square {
            i,
            j,
            base: unsquash_one(unsquash_one(rest, i), j),
        }
    }

    /// Lexicographic rank of a star set among all subsets of the same size.
    fn star_rank(&self, stars: u32) -> u64 {
        let k = stars.count_ones() as u64;
        let n = self.n as u64;
        let mut rank = 0;
        let mut prev: i64 = -1;
        let mut t = 0u64;
        let mut rest = stars;
        while rest != 0 {
            let c = rest.trailing_zeros() as i64;
            rest &= rest - 1;
            t += 1;
            for v in (prev + 1)..c {
                rank += binomial(n - 1 - v as u64, k - t);
            }
            prev = c;
        }
        rank
    }

    fn star_unrank(&self, k: u32, mut rank: u64) -> u32 {
        let n = self.n as u64;
        let mut stars = 0;
        let mut v = 0u64;
        for t in 1..=k as u64 {
            loop {
                let block = binomial(n - 1 - v, k as u64 - t);
                if rank < block {
                    break;
                }
                rank -= block;
                v += 1;
            }
            stars |= 1 << v;
            v += 1;
        }
        stars
    }

    /// Canonical index of a face among faces of its dimension.
    pub fn face_index(&self, f: &Face) -> u64 {
        let k = f.dim();
        (self.star_rank(f.stars) << (self.n - k)) | squash(f.base, f.stars) as u64
    }

    pub fn face_at(&self, k: u32, index: u64) -> Result<Face> {
        let count = self.num_faces(k);
        if index >= count {
            return Err(Error::Range { index, count });
        }
        let stars = self.star_unrank(k, index >> (self.n - k));
        let rest = (index & ((1u64 << (self.n - k)) - 1)) as u32;
        Ok(Face {
            stars,
            base: unsquash(rest, stars),
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.num_edges()).map(move |k| self.edge_at(k).expect("in range"))
    }

    pub fn squares(&self) -> impl Iterator<Item = Square> + '_ {
        (0..self.num_squares()).map(move |k| self.square_at_unchecked(k))
    }

    /// The `n - 1` squares containing `e`, ordered by the second star coordinate.
    pub fn squares_of_edge(&self, e: &Edge) -> impl Iterator<Item = Square> + '_ {
        let e = *e;
        (0..self.n)
            .filter(move |&k| k != e.dir)
            .map(move |k| Square::from_pair(e.dir, k, e.base & !(1 << k)))
    }

    /// The six squares on the boundary of a 3-face.
    pub fn squares_of_cube(&self, c: &Face) -> Result<[Square; 6]> {
        if c.dim() != 3 {
            return Err(Error::Dimension {
                expected: 3,
                actual: c.dim(),
            });
        }
        let mut rest = c.stars;
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let k = rest.trailing_zeros();
        let b = c.base;
        Ok([
            Square { i, j, base: b },
            Square { i, j, base: b | (1 << k) },
            Square { i, j: k, base: b },
            Square { i, j: k, base: b | (1 << j) },
            Square { i: j, j: k, base: b },
            Square { i: j, j: k, base: b | (1 << i) },
        ])
    }

    /// Squares with the same stars at Hamming distance one: exactly `n - 2`.
    pub fn parallel_neighbors(&self, s: &Square) -> impl Iterator<Item = Square> + '_ {
        let s = *s;
        (0..self.n)
            .filter(move |&k| k != s.i && k != s.j)
            .map(move |k| Square {
                base: s.base ^ (1 << k),
                ..s
            })
    }

    /// For parallel squares `s` and `s xor 2^k`, the four other squares of their 3-cube.
    #[inline]
    pub fn side_squares(&self, s: &Square, k: u32) -> [Square; 4] {
        let b0 = s.base & !(1 << k);
        [
            Square::from_pair(s.i, k, b0),
            Square::from_pair(s.i, k, b0 | (1 << s.j)),
            Square::from_pair(s.j, k, b0),
            Square::from_pair(s.j, k, b0 | (1 << s.i)),
        ]
    }
}
