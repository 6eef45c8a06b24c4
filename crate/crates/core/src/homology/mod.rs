//! Homology of cubical 2-complexes: β₀, β₁ over F₂ and integer torsion.
//!
//! β₁ is `#E - (#V - β₀) - rank(∂₂)`. The rank of ∂₂ is computed on its
//! transpose restricted to the edges outside a spanning forest: no nonzero
//! cycle lies in the span of a forest, so dropping those rows keeps the rank,
//! and what remains is very sparse once singleton pivots are peeled off.

pub mod chain;
pub mod f2;
pub mod snf;

use serde::Serialize;

pub use chain::ChainComplex;

use crate::cube::Cube;
use crate::error::{Error, Result};
use crate::unionfind::UnionFind;

/// Largest edge count accepted by the integer Smith normal form.
pub const SNF_MAX_EDGES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologySummary {
    pub beta0: u64,
    pub beta1_f2: u64,
    /// Invariant factors > 1 of ∂₂; `None` when the complex is too large for the integer pass.
    pub torsion: Option<Vec<u64>>,
}

/// Integer first homology: `Z^free_rank ⊕ ⊕ Z/t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerH1 {
    pub free_rank: u64,
    pub torsion: Vec<u64>,
}

/// Connected components of the 1-skeleton, with the union-find used to build a spanning forest.
fn forest(chain: &ChainComplex) -> (u64, Vec<bool>) {
    let mut uf = UnionFind::new(chain.num_vertices());
    let in_forest = chain
        .d1()
        .iter()
        .map(|&[a, b]| uf.union(a as usize, b as usize))
        .collect();
    (uf.num_sets() as u64, in_forest)
}

pub fn beta0(chain: &ChainComplex) -> u64 {
    forest(chain).0
}

/// Rank of ∂₂ over F₂.
pub fn rank_d2_f2(chain: &ChainComplex) -> usize {
    let (_, in_forest) = forest(chain);
    // column per non-forest edge, listing the squares that contain it
    let mut col_of = vec![u32::MAX; chain.num_edges()];
    let mut ncols = 0u32;
    for (e, &tree) in in_forest.iter().enumerate() {
        if !tree {
            col_of[e] = ncols;
            ncols += 1;
        }
    }
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); ncols as usize];
    for (k, edges) in chain.d2().iter().enumerate() {
        for &e in edges {
            let c = col_of[e as usize];
            if c != u32::MAX {
                columns[c as usize].push(k as u32);
            }
        }
    }
    f2::peeled_rank(chain.num_squares(), &columns)
}

/// Rank of ∂₂ over F₂ by dense bit-parallel elimination of the full matrix.
pub fn rank_d2_f2_dense(chain: &ChainComplex) -> usize {
    let mut m = f2::BitMatrix::new(chain.num_edges());
    for edges in chain.d2() {
        m.push_column(edges);
    }
    m.rank()
}

fn beta1_from_rank(chain: &ChainComplex, b0: u64, rank: usize) -> u64 {
    let cycles = chain.num_edges() as u64 - (chain.num_vertices() as u64 - b0);
    cycles - rank as u64
}

pub fn beta1_f2(chain: &ChainComplex) -> u64 {
    beta1_from_rank(chain, beta0(chain), rank_d2_f2(chain))
}

/// Same as [`beta1_f2`] via the dense elimination; meant for small complexes.
pub fn beta1_f2_dense(chain: &ChainComplex) -> u64 {
    beta1_from_rank(chain, beta0(chain), rank_d2_f2_dense(chain))
}

fn d2_columns(chain: &ChainComplex) -> Vec<Vec<(u32, i64)>> {
    (0..chain.num_squares())
        .map(|k| chain.square_boundary(k).to_vec())
        .collect()
}

/// All nonzero invariant factors of ∂₂ over the integers.
pub fn invariant_factors(chain: &ChainComplex) -> Result<Vec<i64>> {
    if chain.num_edges() > SNF_MAX_EDGES {
        return Err(Error::Capacity(format!(
            "{} edges exceed the integer homology limit of {SNF_MAX_EDGES}",
            chain.num_edges()
        )));
    }
    snf::invariant_factors(chain.num_edges(), &d2_columns(chain))
}

/// Invariant factors of ∂₂ greater than one.
pub fn snf_torsion(chain: &ChainComplex) -> Result<Vec<u64>> {
    Ok(invariant_factors(chain)?
        .into_iter()
        .filter(|&d| d > 1)
        .map(|d| d as u64)
        .collect())
}

pub fn integer_h1(chain: &ChainComplex) -> Result<IntegerH1> {
    let factors = invariant_factors(chain)?;
    let rank = factors.len();
    Ok(IntegerH1 {
        free_rank: beta1_from_rank(chain, beta0(chain), rank),
        torsion: factors.into_iter().filter(|&d| d > 1).map(|d| d as u64).collect(),
    })
}

/// β₀, β₁ over F₂, and torsion when the complex is small enough for the integer pass.
pub fn summarize(chain: &ChainComplex) -> Result<HomologySummary> {
    let torsion = if chain.num_edges() <= SNF_MAX_EDGES {
        Some(snf_torsion(chain)?)
    } else {
        None
    };
    Ok(HomologySummary {
        beta0: beta0(chain),
        beta1_f2: beta1_f2(chain),
        torsion,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Connectivity {
    pub connected: bool,
    pub components: u64,
}

/// Connectivity of the subgraph of the n-cube graph on the edges whose bit is set.
pub fn graph_connectivity(cube: &Cube, edges: &fixedbitset::FixedBitSet) -> Result<Connectivity> {
    if edges.len() != cube.num_edges() {
        return Err(Error::Argument(format!(
            "edge vector has length {}, expected {}",
            edges.len(),
            cube.num_edges()
        )));
    }
    let mut uf = UnionFind::new(cube.num_vertices());
    for k in edges.ones() {
        let e = cube.edge_at(k)?;
        uf.union(e.base as usize, e.head() as usize);
    }
    let components = uf.num_sets() as u64;
    Ok(Connectivity {
        connected: components == 1,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Complex;
    use crate::cube::{Edge, Square};
    use fixedbitset::FixedBitSet;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn single_square() {
        let chain = ChainComplex::from_cells(2, &[Square::new(0, 1, 0, 2).unwrap()], &[]).unwrap();
        chain.verify().unwrap();
        assert_eq!(chain.num_edges(), 4);
        assert_eq!(beta0(&chain), 1);
        assert_eq!(beta1_f2(&chain), 0);
        let open = ChainComplex::from_cells(2, &[], &Square::new(0, 1, 0, 2).unwrap().edges()).unwrap();
        assert_eq!(beta1_f2(&open), 1);
        assert_eq!(integer_h1(&open).unwrap().free_rank, 1);
    }

    #[test]
    fn full_complexes_verify() {
        let c = Complex::sample(4, 1.0, 0).unwrap();
        let chain = ChainComplex::from_complex(&c);
        assert_eq!(chain.num_squares(), 24);
        chain.verify().unwrap();
        for n in 3..=5 {
            let chain = ChainComplex::from_complex(&Complex::sample(n, 1.0, 0).unwrap());
            assert_eq!(beta1_f2(&chain), 0);
            assert_eq!(integer_h1(&chain).unwrap(), IntegerH1 { free_rank: 0, torsion: vec![] });
        }
    }

    #[test]
    fn empty_complex_is_the_cube_graph() {
        for n in 3..=8u32 {
            let chain = ChainComplex::from_complex(&Complex::sample(n, 0.0, 0).unwrap());
            assert_eq!(beta0(&chain), 1);
            assert_eq!(beta1_f2(&chain), (1u64 << (n - 1)) * (n as u64 - 2) + 1);
        }
        let chain = ChainComplex::from_complex(&Complex::sample(5, 0.0, 0).unwrap());
        assert_eq!(beta1_f2(&chain), 49);
    }

    #[test]
    fn fast_rank_matches_dense_oracle() {
        for seed in 0..20 {
            for p in [0.2, 0.35, 0.5, 0.8] {
                let c = Complex::sample(6, p, seed).unwrap();
                let chain = ChainComplex::from_complex(&c);
                assert_eq!(beta1_f2(&chain), beta1_f2_dense(&chain), "seed={seed} p={p}");
            }
        }
        let c = Complex::sample(9, 0.35, 3).unwrap();
        let chain = ChainComplex::from_complex(&c);
        assert_eq!(beta1_f2(&chain), beta1_f2_dense(&chain));
    }

    #[test]
    fn restricted_skeleton_uses_a_forest() {
        // two disjoint open squares: two components, two independent cycles
        let a = Square::new(0, 1, 0, 4).unwrap().edges();
        let b = Square::new(0, 1, 12, 4).unwrap().edges();
        let edges: Vec<Edge> = a.iter().chain(b.iter()).copied().collect();
        let chain = ChainComplex::from_cells(4, &[], &edges).unwrap();
        assert_eq!(beta0(&chain), 2);
        assert_eq!(beta1_f2(&chain), 2);
        assert_eq!(beta1_f2_dense(&chain), 2);
    }

    #[test]
    fn beta1_decreases_along_the_coupling() {
        for seed in 0..8 {
            let mut last = u64::MAX;
            for p in [0.0, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0] {
                let chain = ChainComplex::from_complex(&Complex::sample(7, p, seed).unwrap());
                let b = beta1_f2(&chain);
                assert!(b <= last, "seed={seed} p={p}");
                last = b;
            }
        }
    }

    #[test]
    fn torsion_free_rank_agrees_with_f2_when_no_torsion() {
        for seed in 0..10 {
            let chain = ChainComplex::from_complex(&Complex::sample(5, 0.4, seed).unwrap());
            let h = integer_h1(&chain).unwrap();
            let extra_f2 = h.torsion.iter().filter(|&&t| t % 2 == 0).count() as u64;
            assert_eq!(beta1_f2(&chain), h.free_rank + extra_f2);
        }
    }

    #[test]
    fn snf_is_invariant_under_shuffles() {
        let mut rng = rand_xoshiro::Xoshiro256StarStar::seed_from_u64(9);
        for seed in 0..6 {
            let chain = ChainComplex::from_complex(&Complex::sample(5, 0.5, seed).unwrap());
            let base = invariant_factors(&chain).unwrap();
            let mut cols = d2_columns(&chain);
            let mut perm: Vec<u32> = (0..chain.num_edges() as u32).collect();
            for _ in 0..3 {
                perm.shuffle(&mut rng);
                cols.shuffle(&mut rng);
                let permuted: Vec<Vec<(u32, i64)>> = cols
                    .iter()
                    .map(|c| c.iter().map(|&(r, v)| (perm[r as usize], v)).collect())
                    .collect();
                assert_eq!(snf::invariant_factors(chain.num_edges(), &permuted).unwrap(), base);
            }
        }
    }

    #[test]
    fn snf_capacity() {
        let chain = ChainComplex::from_complex(&Complex::sample(11, 0.0, 0).unwrap());
        assert!(chain.num_edges() > SNF_MAX_EDGES);
        assert!(matches!(snf_torsion(&chain), Err(Error::Capacity(_))));
        let s = summarize(&chain).unwrap();
        assert_eq!(s.torsion, None);
        assert_eq!(s.beta0, 1);
    }

    #[test]
    fn connectivity_extremes() {
        let cube = Cube::new(6).unwrap();
        let mut all = FixedBitSet::with_capacity(cube.num_edges());
        all.insert_range(..);
        assert_eq!(
            graph_connectivity(&cube, &all).unwrap(),
            Connectivity { connected: true, components: 1 }
        );
        let none = FixedBitSet::with_capacity(cube.num_edges());
        assert_eq!(graph_connectivity(&cube, &none).unwrap().components, 64);
        assert!(graph_connectivity(&cube, &FixedBitSet::with_capacity(3)).is_err());
    }
}
