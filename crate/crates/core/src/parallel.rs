//! The parallel relation on squares and the graph `G(V)` it induces.
//!
//! Two parallel squares (same stars, bases differing in one coordinate `k`) are
//! related with respect to a square set `V` when the four other squares of the
//! 3-cube they span all belong to `V`. The graph has every square of the cube as
//! a vertex; adjacency is generated on the fly.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::complex::Complex;
use crate::cube::{Cube, Square};
use crate::error::{arg_err, Result};
use crate::stats::{correlation, Estimate, Summary};
use crate::unionfind::UnionFind;

/// A set of squares over the canonical square index space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareSet {
    n: u32,
    bits: FixedBitSet,
}

impl SquareSet {
    pub fn empty(cube: &Cube) -> Self {
        SquareSet {
            n: cube.n(),
            bits: FixedBitSet::with_capacity(cube.num_squares()),
        }
    }

    pub fn full(cube: &Cube) -> Self {
        let mut s = Self::empty(cube);
        s.bits.insert_range(..);
        s
    }

    pub fn from_bits(cube: &Cube, bits: FixedBitSet) -> Result<Self> {
        if bits.len() != cube.num_squares() {
            return arg_err(format!(
                "square set of length {} for n={} (needs {})",
                bits.len(),
                cube.n(),
                cube.num_squares()
            ));
        }
        Ok(SquareSet { n: cube.n(), bits })
    }

    /// The squares present in a complex.
    pub fn of_complex(c: &Complex) -> Self {
        SquareSet {
            n: c.n(),
            bits: c.faces().clone(),
        }
    }

    pub fn from_squares(cube: &Cube, squares: &[Square]) -> Self {
        let mut s = Self::empty(cube);
        for sq in squares {
            s.insert(cube, sq);
        }
        s
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn into_bits(self) -> FixedBitSet {
        self.bits
    }

    #[inline]
    pub fn contains_index(&self, k: usize) -> bool {
        self.bits.contains(k)
    }

    #[inline]
    pub fn contains(&self, cube: &Cube, s: &Square) -> bool {
        self.bits.contains(cube.square_index(s))
    }

    pub fn insert(&mut self, cube: &Cube, s: &Square) {
        self.bits.insert(cube.square_index(s));
    }

    pub fn remove(&mut self, cube: &Cube, s: &Square) {
        self.bits.set(cube.square_index(s), false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_subset(&self, other: &SquareSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }
}

#[inline]
fn related_along(cube: &Cube, s: &Square, k: u32, v: &SquareSet) -> bool {
    cube.side_squares(s, k).iter().all(|t| v.contains(cube, t))
}

/// Whether parallel squares `s` and `t` are related with respect to `v`.
pub fn related(cube: &Cube, s: &Square, t: &Square, v: &SquareSet) -> Result<bool> {
    let diff = s.base ^ t.base;
    if s.i != t.i || s.j != t.j || diff.count_ones() != 1 {
        return arg_err(format!("squares {s:?} and {t:?} are not parallel"));
    }
    Ok(related_along(cube, s, diff.trailing_zeros(), v))
}

/// Neighbours of `s` in `G(v)`.
pub fn neighbors<'a>(cube: &'a Cube, s: &Square, v: &'a SquareSet) -> impl Iterator<Item = Square> + 'a {
    let s = *s;
    (0..cube.n())
        .filter(move |&k| k != s.i && k != s.j && related_along(cube, &s, k, v))
        .map(move |k| Square {
            base: s.base ^ (1 << k),
            ..s
        })
}

/// Connected components of `G(v)` over all squares.
#[derive(Clone, Debug)]
pub struct ComponentDecomposition {
    /// Component id per square index: the smallest square index in the component.
    pub id: Vec<u32>,
    size: Vec<u32>,
    marked: FixedBitSet,
}

impl ComponentDecomposition {
    pub fn component_of(&self, square_index: usize) -> usize {
        self.id[square_index] as usize
    }

    pub fn size(&self, component: usize) -> usize {
        self.size[component] as usize
    }

    /// Whether the component meets the marked set.
    pub fn is_marked(&self, component: usize) -> bool {
        self.marked.contains(component)
    }

    /// Component ids in increasing order.
    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.id
            .iter()
            .enumerate()
            .filter(|&(k, &c)| k == c as usize)
            .map(|(k, _)| k)
    }

    pub fn count(&self) -> usize {
        self.ids().count()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.ids().map(|c| self.size(c)).collect()
    }
}

/// Union-find over `G(v)`; each pair of parallel squares is examined once.
pub fn components(cube: &Cube, v: &SquareSet, marked: &SquareSet) -> ComponentDecomposition {
    let total = cube.num_squares();
    let mut uf = UnionFind::new(total);
    for idx in 0..total {
        let s = cube.square_at_unchecked(idx);
        for k in 0..cube.n() {
            if k == s.i || k == s.j || s.base >> k & 1 == 1 {
                continue;
            }
            if related_along(cube, &s, k, v) {
                let t = Square {
                    base: s.base | (1 << k),
                    ..s
                };
                uf.union(idx, cube.square_index(&t));
            }
        }
    }
    let id = uf.canonical_labels();
    let mut size = vec![0u32; total];
    let mut flags = FixedBitSet::with_capacity(total);
    for (k, &c) in id.iter().enumerate() {
        size[c as usize] += 1;
        if marked.contains_index(k) {
            flags.insert(c as usize);
        }
    }
    ComponentDecomposition {
        id,
        size,
        marked: flags,
    }
}

/// Largest component of `G(v1)` containing no square of `v1` (0 if none).
pub fn largest_uncolored_component(cube: &Cube, v1: &SquareSet) -> usize {
    let dec = components(cube, v1, v1);
    dec.ids()
        .filter(|&c| !dec.is_marked(c))
        .map(|c| dec.size(c))
        .max()
        .unwrap_or(0)
}

/// Per-trial observation of one star-pair class of `G[Q]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassObservation {
    pub edge_frequency: f64,
    pub color_frequency: f64,
    pub color_degree_correlation: f64,
}

/// Observes the class with stars `{i, j}` in the parallel graph of `c`.
pub fn observe_class(c: &Complex, i: u32, j: u32) -> ClassObservation {
    let cube = c.cube();
    let v = SquareSet::of_complex(c);
    let class_size = 1usize << (cube.n() - 2);
    let first = cube.pair_rank(i, j) << (cube.n() - 2);
    let mut degree = vec![0f64; class_size];
    let mut color = vec![0f64; class_size];
    let mut present_edges = 0u64;
    for off in 0..class_size {
        let s = cube.square_at_unchecked(first + off);
        color[off] = if v.contains_index(first + off) { 1.0 } else { 0.0 };
        for k in 0..cube.n() {
            if k == i || k == j || s.base >> k & 1 == 1 {
                continue;
            }
            if related_along(cube, &s, k, &v) {
                present_edges += 1;
                let t = Square {
                    base: s.base | (1 << k),
                    ..s
                };
                degree[off] += 1.0;
                degree[cube.square_index(&t) - first] += 1.0;
            }
        }
    }
    let candidates = ((cube.n() - 2) as u64) << (cube.n() - 3);
    ClassObservation {
        edge_frequency: present_edges as f64 / candidates as f64,
        color_frequency: color.iter().sum::<f64>() / class_size as f64,
        color_degree_correlation: correlation(&color, &degree),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassLawReport {
    pub n: u32,
    pub p: f64,
    pub trials: u64,
    pub edge_frequency: Estimate,
    pub expected_edge_frequency: f64,
    pub color_frequency: Estimate,
    pub color_degree_correlation: Estimate,
}

/// Monte Carlo check that one class of `G[Q]` has edge density `p^4`, colour
/// density `p`, and colours uncorrelated with degrees. Uses the class `{0, 1}`.
pub fn component_subgraph_law_check(n: u32, p: f64, trials: u64, seed: u64) -> Result<ClassLawReport> {
    if n > 12 {
        return arg_err(format!("law check supports n <= 12, got {n}"));
    }
    if trials < 100 {
        return arg_err(format!("law check needs at least 100 trials, got {trials}"));
    }
    let observations = crate::experiment::map_trials(trials, seed, |_, ts| {
        Complex::sample(n, p, ts).map(|c| observe_class(&c, 0, 1))
    })?;
    let summary = |f: fn(&ClassObservation) -> f64| Summary::from_values(observations.iter().map(f)).estimate();
    Ok(ClassLawReport {
        n,
        p,
        trials,
        edge_frequency: summary(|o| o.edge_frequency),
        expected_edge_frequency: p.powi(4),
        color_frequency: summary(|o| o.color_frequency),
        color_degree_correlation: summary(|o| o.color_degree_correlation),
    })
}

#[cfg(test)]
pub(crate) fn sample_square_set(cube: &Cube, p: f64, seed: u64) -> SquareSet {
    let c = Complex::sample(cube.n(), p, crate::rng::splitmix64(seed)).expect("valid dimension");
    SquareSet::of_complex(&c)
}
