//! Sampled random 2-complexes: the full 1-skeleton of the n-cube plus a random
//! subset of its squares, each present independently with probability `p`.

use std::io::{Read, Write};

use fixedbitset::FixedBitSet;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::cube::{Cube, Edge, Square};
use crate::error::{arg_err, Error, Result};
use crate::rng;

/// Smallest dimension accepted by [`Complex::sample`].
pub const MIN_SAMPLE_DIM: u32 = 3;

#[derive(Clone, Debug)]
pub struct Complex {
    cube: Cube,
    faces: FixedBitSet,
    p: f64,
    seed: u64,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.cube.n() == other.cube.n()
            && self.faces == other.faces
            && self.p.to_bits() == other.p.to_bits()
            && self.seed == other.seed
    }
}

impl Complex {
    /// Draws a complex; face `k` is present iff the `k`-th stream output is below
    /// `floor(p * 2^64)`, so a shared seed couples complexes monotonically in `p`.
    pub fn sample(n: u32, p: f64, seed: u64) -> Result<Self> {
        if !(MIN_SAMPLE_DIM..=crate::cube::MAX_DIM).contains(&n) {
            return arg_err(format!("n={n} outside {MIN_SAMPLE_DIM}..={}", crate::cube::MAX_DIM));
        }
        if !(0.0..=1.0).contains(&p) {
            return arg_err(format!("p={p} outside [0, 1]"));
        }
        let cube = Cube::new(n)?;
        let count = cube.num_squares();
        let mut faces = FixedBitSet::with_capacity(count);
        match rng::inclusion_threshold(p) {
            None => faces.insert_range(..),
            Some(0) => {}
            Some(cut) => {
                let mut stream = rng::face_stream(seed);
                for k in 0..count {
                    if stream.next_u64() < cut {
                        faces.insert(k);
                    }
                }
            }
        }
        Ok(Complex { cube, faces, p, seed })
    }

    /// A complex with exactly the given squares. Provenance is recorded as `p = 0`, `seed = 0`.
    pub fn from_squares(n: u32, squares: &[Square]) -> Result<Self> {
        let cube = Cube::new(n)?;
        let mut faces = FixedBitSet::with_capacity(cube.num_squares());
        for s in squares {
            Square::new(s.i, s.j, s.base, n)?;
            faces.insert(cube.square_index(s));
        }
        Ok(Complex {
            cube,
            faces,
            p: 0.0,
            seed: 0,
        })
    }

    pub fn from_bits(n: u32, faces: FixedBitSet, p: f64, seed: u64) -> Result<Self> {
        let cube = Cube::new(n)?;
        if faces.len() != cube.num_squares() {
            return arg_err(format!(
                "face vector has {} bits, n={n} needs {}",
                faces.len(),
                cube.num_squares()
            ));
        }
        Ok(Complex { cube, faces, p, seed })
    }

    pub fn n(&self) -> u32 {
        self.cube.n()
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn faces(&self) -> &FixedBitSet {
        &self.faces
    }

    pub fn face_count(&self) -> usize {
        self.faces.count_ones(..)
    }

    pub fn contains(&self, s: &Square) -> bool {
        self.faces.contains(self.cube.square_index(s))
    }

    pub fn present_squares(&self) -> impl Iterator<Item = Square> + '_ {
        self.faces.ones().map(|k| self.cube.square_at_unchecked(k))
    }

    /// This complex with every square of `extra` added.
    pub fn with_added(&self, extra: &FixedBitSet) -> Complex {
        let mut faces = self.faces.clone();
        faces.union_with(extra);
        Complex {
            faces,
            ..self.clone()
        }
    }

    pub fn edge_degrees(&self) -> EdgeDegreeTable {
        let mut deg = vec![0u8; self.cube.num_edges()];
        for k in self.faces.ones() {
            let s = self.cube.square_at_unchecked(k);
            for e in s.edges() {
                deg[self.cube.edge_index(&e)] += 1;
            }
        }
        EdgeDegreeTable { deg }
    }

    /// Edges lying in no present square.
    pub fn maximal_edges(&self) -> Vec<Edge> {
        self.edge_degrees().edges_with(&self.cube, |d| d == 0)
    }

    pub fn classify_light_heavy(&self, m: u64) -> LightHeavy {
        let table = self.edge_degrees();
        let mut light = Vec::new();
        let mut heavy = Vec::new();
        for (k, &d) in table.deg.iter().enumerate() {
            let e = self.cube.edge_at(k).expect("in range");
            if d as u64 <= m {
                light.push(e);
            } else {
                heavy.push(e);
            }
        }
        LightHeavy { light, heavy }
    }

    pub fn write_qcx<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = [0u8; HEADER_LEN];
        header[..4].copy_from_slice(&QCX_MAGIC);
        header[4] = QCX_VERSION;
        header[5] = self.n() as u8;
        header[8..16].copy_from_slice(&self.p.to_le_bytes());
        header[16..24].copy_from_slice(&self.seed.to_le_bytes());
        header[24..32].copy_from_slice(&(self.faces.len() as u64).to_le_bytes());
        w.write_all(&header)?;
        w.write_all(&payload_bytes(&self.faces))?;
        Ok(())
    }

    pub fn to_qcx_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_qcx(&mut out).expect("writing to a Vec cannot fail");
        out
    }

    pub fn read_qcx<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        Self::from_qcx_bytes(&bytes)
    }

    pub fn from_qcx_bytes(bytes: &[u8]) -> Result<Self> {
        let fail = |offset: usize, message: String| Error::Format {
            offset: offset as u64,
            message,
        };
        if bytes.len() < HEADER_LEN {
            return Err(fail(bytes.len(), format!("truncated header ({} bytes)", bytes.len())));
        }
        if bytes[..4] != QCX_MAGIC {
            return Err(fail(0, "bad magic".into()));
        }
        if bytes[4] != QCX_VERSION {
            return Err(fail(4, format!("unsupported version {}", bytes[4])));
        }
        let n = bytes[5] as u32;
        if !(MIN_SAMPLE_DIM..=crate::cube::MAX_DIM).contains(&n) {
            return Err(fail(5, format!("dimension {n} out of range")));
        }
        if bytes[6] != 0 || bytes[7] != 0 {
            return Err(fail(6, "reserved bytes not zero".into()));
        }
        let word = |at: usize| u64::from_le_bytes(bytes[at..at + 8].try_into().expect("8 bytes"));
        let p = f64::from_bits(word(8));
        if !(0.0..=1.0).contains(&p) {
            return Err(fail(8, format!("probability {p} outside [0, 1]")));
        }
        let seed = word(16);
        let count = word(24);
        let cube = Cube::new(n)?;
        if count != cube.num_squares() as u64 {
            return Err(fail(
                24,
                format!("face count {count} does not match n={n} ({})", cube.num_squares()),
            ));
        }
        let count = count as usize;
        let need = count.div_ceil(8);
        let payload = &bytes[HEADER_LEN..];
        if payload.len() < need {
            return Err(fail(bytes.len(), format!("payload truncated: {} of {need} bytes", payload.len())));
        }
        if payload.len() > need {
            return Err(fail(HEADER_LEN + need, "trailing bytes after payload".into()));
        }
        let mut faces = FixedBitSet::with_capacity(count);
        for (b, &byte) in payload.iter().enumerate() {
            for bit in 0..8 {
                if byte >> bit & 1 == 1 {
                    let k = b * 8 + bit;
                    if k >= count {
                        return Err(fail(HEADER_LEN + b, "padding bits set".into()));
                    }
                    faces.insert(k);
                }
            }
        }
        Ok(Complex { cube, faces, p, seed })
    }
}

pub const QCX_MAGIC: [u8; 4] = *b"QC2X";
pub const QCX_VERSION: u8 = 1;
const HEADER_LEN: usize = 32;

fn payload_bytes(bits: &FixedBitSet) -> Vec<u8> {
    let need = bits.len().div_ceil(8);
    let mut out: Vec<u8> = bits
        .as_slice()
        .iter()
        .flat_map(|block| block.to_le_bytes())
        .collect();
    out.truncate(need);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDegreeTable {
    /// Degree per canonical edge index.
    pub deg: Vec<u8>,
}

impl EdgeDegreeTable {
    pub fn get(&self, cube: &Cube, e: &Edge) -> u8 {
        self.deg[cube.edge_index(e)]
    }

    pub fn total(&self) -> u64 {
        self.deg.iter().map(|&d| d as u64).sum()
    }

    pub fn count_where(&self, pred: impl Fn(u8) -> bool) -> usize {
        self.deg.iter().filter(|&&d| pred(d)).count()
    }

    pub fn edges_with(&self, cube: &Cube, pred: impl Fn(u8) -> bool) -> Vec<Edge> {
        self.deg
            .iter()
            .enumerate()
            .filter(|&(_, &d)| pred(d))
            .map(|(k, _)| cube.edge_at(k).expect("in range"))
            .collect()
    }

    /// Smallest degree among the four edges of `s`.
    pub fn min_on_square(&self, cube: &Cube, s: &Square) -> u8 {
        s.edges().iter().map(|e| self.get(cube, e)).min().expect("four edges")
    }
}

#[derive(Clone, Debug, Default)]
pub struct LightHeavy {
    pub light: Vec<Edge>,
    pub heavy: Vec<Edge>,
}

/// The two integer cut-offs used in the contraction analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Smallest `T >= 1` with `2 (1-p)^T < 1`.
    pub t_p: u64,
    /// Smallest `M >= 1` with `Pr(Binomial(floor(M/4), p^3) < T_p) < 2^(-1/4)`.
    pub m_p: u64,
}

impl Thresholds {
    pub fn compute(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return arg_err(format!("thresholds need p in (0, 1), got {p}"));
        }
        let t_p = component_cutoff(p);
        let q = p * p * p;
        let target = 0.5f64.powf(0.25);
        let below = |k: u64| binomial_cdf_below(k, q, t_p) < target;
        // Probability is non-increasing in the trial count; find the first k by doubling then bisection.
        let mut hi = 1u64;
        while !below(hi) {
            hi = hi.checked_mul(2).ok_or(Error::Overflow("light-edge threshold search"))?;
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if below(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Thresholds { t_p, m_p: 4 * hi })
    }
}

fn component_cutoff(p: f64) -> u64 {
    let mut t = 1u64;
    let mut v = 2.0 * (1.0 - p);
    while v >= 1.0 {
        v *= 1.0 - p;
        t += 1;
    }
    t
}

/// `Pr(Binomial(trials, q) < t)`, summed with Kahan compensation.
pub fn binomial_cdf_below(trials: u64, q: f64, t: u64) -> f64 {
    if t == 0 {
        return 0.0;
    }
    if t > trials {
        return 1.0;
    }
    let ratio = q / (1.0 - q);
    let mut term = ((trials as f64) * (-q).ln_1p()).exp();
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for j in 0..t {
        let y = term - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        term *= (trials - j) as f64 / (j + 1) as f64 * ratio;
    }
    sum.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_probabilities() {
        let empty = Complex::sample(5, 0.0, 1).unwrap();
        assert_eq!(empty.face_count(), 0);
        let full = Complex::sample(5, 1.0, 1).unwrap();
        assert_eq!(full.face_count(), full.cube().num_squares());
        assert!(full.maximal_edges().is_empty());
        assert!(full.edge_degrees().deg.iter().all(|&d| d == 4));
        assert!(empty.edge_degrees().deg.iter().all(|&d| d == 0));
    }

    #[test]
    fn sample_rejects_bad_arguments() {
        assert!(Complex::sample(2, 0.5, 0).is_err());
        assert!(Complex::sample(25, 0.5, 0).is_err());
        assert!(Complex::sample(5, 1.5, 0).is_err());
        assert!(Complex::sample(5, f64::NAN, 0).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = Complex::sample(7, 0.4, 99).unwrap();
        let b = Complex::sample(7, 0.4, 99).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.faces(), Complex::sample(7, 0.4, 100).unwrap().faces());
    }

    #[test]
    fn coupling_is_monotone_in_p() {
        let ps = [0.1, 0.3, 0.5, 0.7, 0.9];
        for seed in 0..5 {
            let cs: Vec<_> = ps.iter().map(|&p| Complex::sample(6, p, seed).unwrap()).collect();
            for w in cs.windows(2) {
                assert!(w[0].faces().is_subset(w[1].faces()));
                assert!(w[0].maximal_edges().len() >= w[1].maximal_edges().len());
            }
        }
    }

    #[test]
    fn degree_sum_is_four_times_faces() {
        for seed in 0..10 {
            let c = Complex::sample(7, 0.37, seed).unwrap();
            assert_eq!(c.edge_degrees().total(), 4 * c.face_count() as u64);
        }
    }

    #[test]
    fn maximal_edges_match_direct_scan() {
        let c = Complex::sample(6, 0.5, 2024).unwrap();
        let cube = c.cube();
        let mut direct = 0;
        for e in cube.edges() {
            if cube.squares_of_edge(&e).all(|s| !c.contains(&s)) {
                direct += 1;
            }
        }
        assert_eq!(cube.num_edges(), 192);
        assert_eq!(c.maximal_edges().len(), direct);
    }

    #[test]
    fn light_heavy_extremes() {
        let c = Complex::sample(6, 0.5, 3).unwrap();
        let all = c.classify_light_heavy(5);
        assert_eq!(all.light.len(), c.cube().num_edges());
        let full = Complex::sample(6, 1.0, 3).unwrap();
        assert!(full.classify_light_heavy(0).light.is_empty());
    }

    #[test]
    fn thresholds_examples() {
        assert_eq!(Thresholds::compute(0.5).unwrap().t_p, 2);
        let t = Thresholds::compute(0.6).unwrap();
        assert_eq!((t.t_p, t.m_p), (1, 4));
        assert_eq!(Thresholds::compute(0.999).unwrap().t_p, 1);
        assert_eq!(Thresholds::compute(0.75).unwrap().t_p, 1);
        assert!(Thresholds::compute(0.0).is_err());
        assert!(Thresholds::compute(1.0).is_err());
    }

    // Exact rational evaluation of the defining inequalities for p = a/b.
    fn brute_thresholds(a: u64, b: u64) -> (u64, u64) {
        use num_rational::BigRational;
        use num_bigint::BigInt;
        let p = BigRational::new(BigInt::from(a), BigInt::from(b));
        let one = BigRational::from_integer(1.into());
        let mut t = 1u64;
        loop {
            let v = BigRational::from_integer(2.into()) * pow(&(&one - &p), t);
            if v < one {
                break;
            }
            t += 1;
        }
        let q = &p * &p * &p;
        let target = 0.5f64.powf(0.25);
        let mut k = 1u64;
        loop {
            let mut cdf = BigRational::from_integer(0.into());
            for j in 0..t.min(k + 1) {
                cdf += BigRational::from_integer(crate::cube::binomial(k, j).into())
                    * pow(&q, j)
                    * pow(&(&one - &q), k - j);
            }
            let approx = num_traits::ToPrimitive::to_f64(&cdf).unwrap();
            if approx < target {
                return (t, 4 * k);
            }
            k += 1;
        }
    }

    fn pow(x: &num_rational::BigRational, e: u64) -> num_rational::BigRational {
        let mut acc = num_rational::BigRational::from_integer(1.into());
        for _ in 0..e {
            acc *= x;
        }
        acc
    }

    #[test]
    fn thresholds_agree_with_exact_arithmetic() {
        for (a, b) in [(1, 2), (3, 5), (3, 4), (2, 5), (7, 10), (9, 10), (3, 10)] {
            let got = Thresholds::compute(a as f64 / b as f64).unwrap();
            assert_eq!((got.t_p, got.m_p), brute_thresholds(a, b), "p={a}/{b}");
        }
    }

    #[test]
    fn qcx_roundtrip_and_layout() {
        let c = Complex::sample(5, 0.3, 77).unwrap();
        let bytes = c.to_qcx_bytes();
        assert_eq!(&bytes[..4], &[0x51, 0x43, 0x32, 0x58]);
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 5);
        assert_eq!(&bytes[6..8], &[0, 0]);
        assert_eq!(bytes.len(), 32 + 80usize.div_ceil(8));
        for k in 0..80 {
            let bit = bytes[32 + k / 8] >> (k % 8) & 1 == 1;
            assert_eq!(bit, c.faces().contains(k));
        }
        assert_eq!(Complex::from_qcx_bytes(&bytes).unwrap(), c);
    }

    #[test]
    fn qcx_errors_carry_offsets() {
        let good = Complex::sample(4, 0.5, 1).unwrap().to_qcx_bytes();
        let offset = |b: &[u8]| match Complex::from_qcx_bytes(b) {
            Err(Error::Format { offset, .. }) => offset,
            other => panic!("expected format error, got {other:?}"),
        };
        assert_eq!(offset(&good[..10]), 10);
        let mut bad = good.clone();
        bad[0] = b'X';
        assert_eq!(offset(&bad), 0);
        let mut bad = good.clone();
        bad[4] = 2;
        assert_eq!(offset(&bad), 4);
        let mut bad = good.clone();
        bad[24] = 3;
        assert_eq!(offset(&bad), 24);
        let mut bad = good.clone();
        bad.push(0);
        assert_eq!(offset(&bad), 32 + 3);
    }
}
