//! Component-size bounds: boundary counts, the exact `g(s)` for tiny cubes, and
//! its closed-form upper bound.

use std::collections::BTreeMap;

use crate::cube::{Vertex, MAX_DIM};
use crate::error::{arg_err, Error, Result};

/// Largest `n` and `s` for the exhaustive connected-subset enumeration.
pub const GS_EXACT_MAX_N: u32 = 5;
pub const GS_EXACT_MAX_S: u32 = 5;

/// `b(S)`: edges of `Q^n` with exactly one endpoint in `S`. Repeated vertices count once.
pub fn boundary_count(n: u32, s: &[Vertex]) -> Result<u64> {
    if n == 0 || n > MAX_DIM {
        return arg_err(format!("n={n} outside 1..={MAX_DIM}"));
    }
    let mut set: Vec<Vertex> = s.to_vec();
    set.sort_unstable();
    set.dedup();
    if let Some(&v) = set.iter().find(|&&v| v >> n != 0) {
        return arg_err(format!("vertex {v} is not in Q^{n}"));
    }
    let mut b = 0;
    for &v in &set {
        for k in 0..n {
            if set.binary_search(&(v ^ (1 << k))).is_err() {
                b += 1;
            }
        }
    }
    Ok(b)
}

/// Most edges induced by `s` vertices of a hypercube: `sum_{k<s} popcount(k)`.
pub fn max_induced_edges(s: u64) -> u64 {
    (0..s).map(|k| k.count_ones() as u64).sum()
}

/// Edge-isoperimetric lower bound on `b(S)` for `|S| = s`: `s*n - 2*max_induced_edges(s)`.
pub fn isoperimetric_bound(n: u32, s: u64) -> u64 {
    (s * n as u64).saturating_sub(2 * max_induced_edges(s))
}

/// `s * (n - floor(log2 s))`, the exponent used in the closed-form bound on `g(s)`.
pub fn floor_log_exponent(n: u32, s: u64) -> i64 {
    s as i64 * (n as i64 - s.ilog2() as i64)
}

fn neighbors_mask(n: u32, v: u32) -> u64 {
    (0..n).fold(0u64, |m, k| m | 1 << (v ^ (1 << k)))
}

/// Every connected vertex set of size `s` in `Q^n` (as bit masks over vertices), each once.
///
/// Extension-set enumeration: a set grows from its smallest vertex, only by vertices
/// larger than that root that are new neighbours of the most recent addition.
pub fn connected_subsets(n: u32, s: u32) -> Result<Vec<u64>> {
    if n == 0 || n > GS_EXACT_MAX_N || s > GS_EXACT_MAX_S {
        return Err(Error::Capacity(format!(
            "connected-subset enumeration limited to 1 <= n <= {GS_EXACT_MAX_N}, s <= {GS_EXACT_MAX_S}"
        )));
    }
    if s == 0 {
        return arg_err("s must be at least 1");
    }
    let nbr: Vec<u64> = (0..1u32 << n).map(|v| neighbors_mask(n, v)).collect();
    let mut out = Vec::new();

    fn extend(sub: u64, ext: u64, root: u32, left: u32, nbr: &[u64], out: &mut Vec<u64>) {
        if left == 0 {
            out.push(sub);
            return;
        }
        let closed = sub | sub_neighbors(sub, nbr);
        let mut ext = ext;
        while ext != 0 {
            let w = ext.trailing_zeros();
            ext &= ext - 1;
            let above_root = !((2u64 << root) - 1);
            let fresh = nbr[w as usize] & !closed & above_root;
            extend(sub | 1 << w, ext | fresh, root, left - 1, nbr, out);
        }
    }

    fn sub_neighbors(sub: u64, nbr: &[u64]) -> u64 {
        let mut m = 0;
        let mut rest = sub;
        while rest != 0 {
            let v = rest.trailing_zeros();
            rest &= rest - 1;
            m |= nbr[v as usize];
        }
        m
    }

    for v in 0..1u32 << n {
        let above = !((2u64 << v) - 1);
        extend(1 << v, nbr[v as usize] & above, v, s - 1, &nbr, &mut out);
    }
    Ok(out)
}

/// Number of connected `s`-sets by boundary size.
pub fn boundary_histogram(n: u32, s: u32) -> Result<BTreeMap<u64, u64>> {
    let mut hist = BTreeMap::new();
    for set in connected_subsets(n, s)? {
        let verts: Vec<Vertex> = (0..64).filter(|k| set >> k & 1 == 1).collect();
        *hist.entry(boundary_count(n, &verts)?).or_insert(0) += 1;
    }
    Ok(hist)
}

/// `g(s) = sum over connected S with |S| = s of (1-p)^b(S)`.
pub fn gs_exact(n: u32, p: f64, s: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return arg_err(format!("p={p} outside [0, 1]"));
    }
    let q = 1.0 - p;
    Ok(boundary_histogram(n, s)?
        .into_iter()
        .map(|(b, count)| count as f64 * q.powi(b as i32))
        .sum())
}

/// Natural log of `2^n (n s)^s (1-p)^(s (n - floor(log2 s)))`.
pub fn gs_bound_ln(n: u32, p: f64, s: u64) -> Result<f64> {
    if s == 0 {
        return arg_err("s must be at least 1");
    }
    if !(0.0..=1.0).contains(&p) {
        return arg_err(format!("p={p} outside [0, 1]"));
    }
    let n_f = n as f64;
    let exponent = floor_log_exponent(n, s) as f64;
    let tail = if exponent == 0.0 { 0.0 } else { exponent * (1.0 - p).ln() };
    Ok(n_f * std::f64::consts::LN_2 + s as f64 * (n_f * s as f64).ln() + tail)
}

pub fn gs_bound(n: u32, p: f64, s: u64) -> Result<f64> {
    gs_bound_ln(n, p, s).map(f64::exp)
}

/// Natural log of the bound summed over `s` in `lo..=hi` (log-sum-exp).
pub fn gs_bound_sum_ln(n: u32, p: f64, lo: u64, hi: u64) -> Result<f64> {
    if lo == 0 || hi < lo {
        return arg_err(format!("bad range {lo}..={hi}"));
    }
    let terms: Vec<f64> = (lo..=hi).map(|s| gs_bound_ln(n, p, s)).collect::<Result<_>>()?;
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(top);
    }
    Ok(top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_connected(n: u32, set: u64) -> bool {
        let start = set.trailing_zeros();
        let mut seen = 1u64 << start;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for k in 0..n {
                let u = v ^ (1 << k);
                if set >> u & 1 == 1 && seen >> u & 1 == 0 {
                    seen |= 1 << u;
                    stack.push(u);
                }
            }
        }
        seen == set
    }

    fn brute_force_subsets(n: u32, s: u32) -> Vec<u64> {
        let v = 1u32 << n;
        let mut out = Vec::new();
        // walk all s-subsets of the 2^n vertices
        let mut idx: Vec<u32> = (0..s).collect();
        loop {
            let set = idx.iter().fold(0u64, |m, &i| m | 1 << i);
            if is_connected(n, set) {
                out.push(set);
            }
            let mut k = s as usize;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if idx[k] < v - s + k as u32 {
                    idx[k] += 1;
                    for t in k + 1..s as usize {
                        idx[t] = idx[t - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn boundary_examples() {
        assert_eq!(boundary_count(5, &[7]).unwrap(), 5);
        let all: Vec<u32> = (0..16).collect();
        assert_eq!(boundary_count(4, &all).unwrap(), 0);
        assert_eq!(boundary_count(3, &[0b000, 0b001, 0b011, 0b010]).unwrap(), 4);
        assert!(boundary_count(3, &[8]).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in 1..=5 {
            for s in 1..=5u32.min(1 << n) {
                let mut fast = connected_subsets(n, s).unwrap();
                let total = fast.len();
                fast.sort_unstable();
                fast.dedup();
                assert_eq!(fast.len(), total, "duplicates at n={n} s={s}");
                let mut slow = brute_force_subsets(n, s);
                slow.sort_unstable();
                assert_eq!(fast, slow, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn exact_values() {
        for p in [0.1f64, 0.5, 0.8] {
            for n in 1..=5u32 {
                let want = 2f64.powi(n as i32) * (1.0 - p).powi(n as i32);
                assert!((gs_exact(n, p, 1).unwrap() - want).abs() < 1e-12);
            }
            let want = 12.0 * (1.0 - p).powi(4);
            assert!((gs_exact(3, p, 2).unwrap() - want).abs() < 1e-12);
        }
        assert_eq!(boundary_histogram(3, 2).unwrap(), BTreeMap::from([(4, 12)]));
        assert!(matches!(gs_exact(6, 0.5, 2), Err(Error::Capacity(_))));
        assert!(matches!(gs_exact(4, 0.5, 6), Err(Error::Capacity(_))));
    }

    #[test]
    fn bound_formula() {
        for n in [3u32, 7, 12] {
            let direct = 2f64.powi(n as i32) * n as f64 * 0.7f64.powi(n as i32);
            assert!((gs_bound(n, 0.3, 1).unwrap() / direct - 1.0).abs() < 1e-12);
        }
        for n in 2..=12u32 {
            for s in 1..=6u64 {
                let e = floor_log_exponent(n, s);
                let direct = 2f64.powi(n as i32) * ((n as u64 * s) as f64).powi(s as i32) * 0.5f64.powi(e as i32);
                assert!((gs_bound(n, 0.5, s).unwrap() / direct - 1.0).abs() < 1e-12);
            }
        }
        let v = gs_bound(20, 0.5, 4).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn exact_below_bound() {
        for n in 1..=5u32 {
            for s in 1..=5u32.min(1 << n) {
                for k in 1..=9 {
                    let p = k as f64 / 10.0;
                    let exact = gs_exact(n, p, s).unwrap();
                    let bound = gs_bound(n, p, s as u64).unwrap();
                    assert!(exact <= bound * (1.0 + 1e-12), "n={n} s={s} p={p}");
                }
            }
        }
    }

    #[test]
    fn isoperimetric_bound_holds_and_is_tight() {
        for n in 1..=5u32 {
            for s in 1..=5u32.min(1 << n) {
                let hist = boundary_histogram(n, s).unwrap();
                let min_b = *hist.keys().next().unwrap();
                assert_eq!(min_b, isoperimetric_bound(n, s as u64), "n={n} s={s}");
            }
        }
    }

    #[test]
    fn floor_log_form_is_not_a_lower_bound() {
        // a path on three vertices of Q^3 has boundary 5, below 3 * (3 - 1)
        assert_eq!(boundary_count(3, &[0b000, 0b001, 0b011]).unwrap(), 5);
        assert_eq!(floor_log_exponent(3, 3), 6);
        // it does hold whenever s is a power of two
        for n in 1..=5u32 {
            for s in [1u32, 2, 4] {
                if s <= 1 << n {
                    let min_b = *boundary_histogram(n, s).unwrap().keys().next().unwrap();
                    assert!(min_b as i64 >= floor_log_exponent(n, s as u64));
                }
            }
        }
    }

    #[test]
    fn bound_sum_decays_in_n() {
        let p = 0.5;
        let sum = |n: u32| {
            let hi = (2f64.powf(0.1 * n as f64)).floor() as u64;
            gs_bound_sum_ln(n, p, 2, hi.max(2)).unwrap()
        };
        for n in 10..20 {
            assert!(sum(n + 1) < sum(n), "n={n}");
        }
        assert!(sum(20) < 0.0);
    }
}
