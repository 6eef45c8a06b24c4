//! Small explicit complexes and the local structures built around them.
//!
//! Face tables are written in star notation: position `t` (left to right) is
//! coordinate `t`, i.e. bit `t` of a vertex.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::complex::Complex;
use crate::cube::{box_span, Cube, Edge, Face, Square, Vertex};
use crate::error::{arg_err, Error, Result};
use crate::homology::ChainComplex;

const TORUS: [&str; 16] = [
    "(*,0,0,*)", "(0,*,0,*)", "(*,1,0,*)", "(1,*,0,*)",
    "(*,0,*,1)", "(0,*,*,1)", "(*,1,*,1)", "(1,*,*,1)",
    "(*,0,1,*)", "(0,*,1,*)", "(*,1,1,*)", "(1,*,1,*)",
    "(*,0,*,0)", "(0,*,*,0)", "(*,1,*,0)", "(1,*,*,0)",
];

const PROJECTIVE_PLANE: [&str; 20] = [
    "(0,0,0,*,*)", "(0,0,1,*,*)", "(0,0,*,1,*)", "(0,0,*,*,1)",
    "(0,1,*,*,0)", "(0,*,0,0,*)", "(0,*,1,*,0)", "(0,*,*,0,0)",
    "(0,*,*,1,0)", "(1,0,*,0,*)", "(1,*,0,0,*)", "(1,*,0,*,0)",
    "(*,0,0,*,0)", "(*,0,1,0,*)", "(*,0,*,0,0)", "(*,0,*,0,1)",
    "(*,1,0,0,*)", "(*,*,0,0,1)", "(*,1,0,*,0)", "(*,*,0,1,0)",
];

const KLEIN: [&str; 28] = [
    "(*,*,1,0,0)", "(*,*,0,0,0)", "(0,*,*,0,0)", "(1,*,*,0,0)",
    "(0,1,*,*,0)", "(1,1,*,*,0)", "(*,1,0,*,0)", "(*,1,1,*,0)",
    "(0,*,*,1,0)", "(1,*,*,1,0)", "(*,*,1,1,0)", "(*,0,*,1,0)",
    "(0,*,0,1,*)", "(1,*,0,1,*)", "(*,0,0,1,*)", "(*,1,0,1,*)",
    "(*,1,*,1,1)", "(0,*,*,1,1)", "(1,*,*,1,1)", "(*,*,1,1,1)",
    "(0,0,*,*,1)", "(1,0,*,*,1)", "(*,0,0,*,1)", "(*,0,1,*,1)",
    "(0,0,*,0,*)", "(1,0,*,0,*)", "(*,0,0,0,*)", "(*,0,1,0,*)",
];

/// Parses `(*,0,1)`-style star notation into a face of `Q^n`, `n` being the entry count.
pub fn parse_star(text: &str) -> Result<(u32, Face)> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| Error::Argument(format!("star notation must be parenthesized: {text:?}")))?;
    let mut stars = 0u32;
    let mut base = 0u32;
    let mut n = 0u32;
    for (t, tok) in inner.split(',').enumerate() {
        if t >= crate::cube::MAX_DIM as usize {
            return arg_err(format!("too many coordinates in {text:?}"));
        }
        match tok.trim() {
            "*" => stars |= 1 << t,
            "0" => {}
            "1" => base |= 1 << t,
            other => return arg_err(format!("bad coordinate {other:?} in {text:?}")),
        }
        n += 1;
    }
    Ok((n, Face { stars, base }))
}

/// Star notation of a face of `Q^n`.
pub fn star_string(f: &Face, n: u32) -> String {
    let parts: Vec<&str> = (0..n)
        .map(|k| {
            if f.stars >> k & 1 == 1 {
                "*"
            } else if f.base >> k & 1 == 1 {
                "1"
            } else {
                "0"
            }
        })
        .collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessName {
    Torus,
    Rp2,
    Klein,
}

impl WitnessName {
    pub const ALL: [WitnessName; 3] = [WitnessName::Torus, WitnessName::Rp2, WitnessName::Klein];

    pub fn as_str(&self) -> &'static str {
        match self {
            WitnessName::Torus => "torus",
            WitnessName::Rp2 => "rp2",
            WitnessName::Klein => "klein",
        }
    }

    /// Edge count stated for the construction; compared against the computed count in tests.
    pub fn stated_edge_count(&self) -> u64 {
        match self {
            WitnessName::Torus => 32,
            WitnessName::Rp2 => 40,
            WitnessName::Klein => 56,
        }
    }

    fn table(&self) -> &'static [&'static str] {
        match self {
            WitnessName::Torus => &TORUS,
            WitnessName::Rp2 => &PROJECTIVE_PLANE,
            WitnessName::Klein => &KLEIN,
        }
    }
}

impl fmt::Display for WitnessName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WitnessName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(WitnessName::Torus),
            "rp2" => Ok(WitnessName::Rp2),
            "klein" => Ok(WitnessName::Klein),
            other => arg_err(format!("unknown witness {other:?}; expected torus, rp2 or klein")),
        }
    }
}

/// A pure 2-dimensional complex `T` in a small cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessComplex {
    pub name: String,
    pub n: u32,
    pub squares: Vec<Square>,
}

impl WitnessComplex {
    pub fn build(name: WitnessName) -> Result<Self> {
        let mut n = 0;
        let mut squares = Vec::new();
        for text in name.table() {
            let (dim, face) = parse_star(text)?;
            n = dim;
            let s = face
                .as_square()
                .ok_or_else(|| Error::Argument(format!("{text} is not a 2-face")))?;
            squares.push(s);
        }
        Self::custom(name.as_str(), n, squares)
    }

    /// Any set of distinct squares of `Q^n`.
    pub fn custom(name: &str, n: u32, squares: Vec<Square>) -> Result<Self> {
        if squares.is_empty() {
            return arg_err("a witness needs at least one square");
        }
        let mut seen = HashSet::new();
        for s in &squares {
            Square::new(s.i, s.j, s.base, n)?;
            if !seen.insert(*s) {
                return arg_err(format!("duplicate square {s:?}"));
            }
        }
        Ok(WitnessComplex {
            name: name.to_string(),
            n,
            squares,
        })
    }

    /// Edges of the complex (union of its squares' edges), sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.squares.iter().flat_map(|s| s.edges()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn edge_count(&self) -> u64 {
        self.edges().len() as u64
    }

    /// `1 - (1/2)^(1/e(T))`.
    pub fn threshold(&self) -> f64 {
        1.0 - 0.5f64.powf(1.0 / self.edge_count() as f64)
    }

    /// The complex on its own restricted skeleton.
    pub fn chain(&self) -> ChainComplex {
        ChainComplex::from_cells(self.n, &self.squares, &[]).expect("validated squares")
    }

    /// The smallest cube containing the complex.
    pub fn span(&self) -> Face {
        let faces: Vec<Face> = self.squares.iter().map(|s| s.as_face()).collect();
        box_span(&faces).expect("nonempty")
    }

    /// `X`: the spanning cube with every square that is in `T` or shares no edge with `T`.
    pub fn enclosing_faces(&self) -> Vec<Square> {
        let edges: HashSet<Edge> = self.edges().into_iter().collect();
        let mine: HashSet<Square> = self.squares.iter().copied().collect();
        self.span()
            .squares()
            .into_iter()
            .filter(|s| mine.contains(s) || s.edges().iter().all(|e| !edges.contains(e)))
            .collect()
    }

    pub fn export(&self) -> WitnessExport {
        WitnessExport {
            name: self.name.clone(),
            n: self.n,
            squares: self.squares.iter().map(|s| star_string(&s.as_face(), self.n)).collect(),
            edges: self.edge_count(),
            threshold: self.threshold(),
        }
    }

    /// The embedded complex as a complex in `Q^N`.
    pub fn to_complex(&self, phi: &Embedding) -> Result<Complex> {
        phi.check_source(self.n)?;
        let mapped: Vec<Square> = self.squares.iter().map(|s| phi.map_square(s)).collect();
        Complex::from_squares(phi.target_n(), &mapped)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessExport {
    pub name: String,
    pub n: u32,
    pub squares: Vec<String>,
    pub edges: u64,
    pub threshold: f64,
}

/// Cubical embedding `Q^n -> Q^N`: coordinate `k` goes to `coords[k]`, the other
/// target coordinates are fixed by `offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Embedding {
    target_n: u32,
    coords: Vec<u32>,
    offset: Vertex,
}

impl Embedding {
    pub fn new(target_n: u32, coords: Vec<u32>, offset: Vertex) -> Result<Self> {
        Cube::new(target_n)?;
        let mut image = 0u32;
        for &c in &coords {
            if c >= target_n {
                return arg_err(format!("target coordinate {c} outside 0..{target_n}"));
            }
            if image >> c & 1 == 1 {
                return arg_err(format!("coordinate {c} used twice"));
            }
            image |= 1 << c;
        }
        if offset >> target_n != 0 || offset & image != 0 {
            return arg_err(format!("offset {offset:#b} must be zero on the image coordinates"));
        }
        Ok(Embedding {
            target_n,
            coords,
            offset,
        })
    }

    pub fn identity(source_n: u32, target_n: u32) -> Result<Self> {
        Self::new(target_n, (0..source_n).collect(), 0)
    }

    pub fn source_n(&self) -> u32 {
        self.coords.len() as u32
    }

    pub fn target_n(&self) -> u32 {
        self.target_n
    }

    fn check_source(&self, n: u32) -> Result<()> {
        if n != self.source_n() {
            return Err(Error::Dimension {
                expected: self.source_n(),
                actual: n,
            });
        }
        Ok(())
    }

    fn map_bits(&self, v: u32) -> u32 {
        self.coords
            .iter()
            .enumerate()
            .filter(|&(k, _)| v >> k & 1 == 1)
            .fold(0, |acc, (_, &c)| acc | 1 << c)
    }

    pub fn map_vertex(&self, v: Vertex) -> Vertex {
        self.offset | self.map_bits(v)
    }

    pub fn map_edge(&self, e: &Edge) -> Edge {
        Edge {
            dir: self.coords[e.dir as usize],
            base: self.map_vertex(e.base),
        }
    }

    pub fn map_square(&self, s: &Square) -> Square {
        let (a, b) = (self.coords[s.i as usize], self.coords[s.j as usize]);
        Square {
            i: a.min(b),
            j: a.max(b),
            base: self.map_vertex(s.base),
        }
    }

    pub fn map_face(&self, f: &Face) -> Face {
        Face {
            stars: self.map_bits(f.stars),
            base: self.map_vertex(f.base),
        }
    }
}

/// Squares whose presence is fixed by conditions (1) and (2) of the occurrence event.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OccurrenceConstraints {
    pub present: Vec<Square>,
    pub absent: Vec<Square>,
}

impl OccurrenceConstraints {
    /// Probability that a sample at `p` meets all constraints.
    pub fn probability(&self, p: f64) -> f64 {
        p.powi(self.present.len() as i32) * (1.0 - p).powi(self.absent.len() as i32)
    }
}

/// Present/absent squares required for `phi(T)` to occur as its own enclosing complex.
pub fn occurrence_constraints(t: &WitnessComplex, phi: &Embedding) -> Result<OccurrenceConstraints> {
    phi.check_source(t.n)?;
    let target = Cube::new(phi.target_n())?;
    let x_cube = phi.map_face(&t.span());
    let present: HashSet<Square> = t.enclosing_faces().iter().map(|s| phi.map_square(s)).collect();
    let mut absent: HashSet<Square> = x_cube
        .squares()
        .into_iter()
        .filter(|s| !present.contains(s))
        .collect();
    for e in t.edges() {
        for s in target.squares_of_edge(&phi.map_edge(&e)) {
            if !x_cube.contains_square(&s) {
                absent.insert(s);
            }
        }
    }
    let mut present: Vec<Square> = present.into_iter().collect();
    let mut absent: Vec<Square> = absent.into_iter().collect();
    present.sort_unstable();
    absent.sort_unstable();
    Ok(OccurrenceConstraints { present, absent })
}

/// Parameters for the separation condition: edges of degree `<= light_max`
/// are light, and none may lie within `2 * k_cap + 2` of `phi(T)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Separation {
    pub light_max: u64,
    pub k_cap: u32,
}

fn edge_degree(c: &Complex, e: &Edge) -> u64 {
    c.cube().squares_of_edge(e).filter(|s| c.contains(s)).count() as u64
}

/// Whether `phi(T)` occurs in `c` as its own enclosing complex, isolated from the
/// rest of `c`; with `separation`, also that no stray light edges are nearby.
pub fn witness_occurrence(
    c: &Complex,
    t: &WitnessComplex,
    phi: &Embedding,
    separation: Option<Separation>,
) -> Result<bool> {
    if phi.target_n() != c.n() {
        return Err(Error::Dimension {
            expected: phi.target_n(),
            actual: c.n(),
        });
    }
    let constraints = occurrence_constraints(t, phi)?;
    if !constraints.present.iter().all(|s| c.contains(s)) || constraints.absent.iter().any(|s| c.contains(s)) {
        return Ok(false);
    }
    let Some(sep) = separation else { return Ok(true) };

    let t_edges: HashSet<Edge> = t.edges().iter().map(|e| phi.map_edge(e)).collect();
    let x_cube = phi.map_face(&t.span());
    for e in x_cube.edges() {
        if !t_edges.contains(&e) && edge_degree(c, &e) <= sep.light_max {
            return Ok(false);
        }
    }
    let radius = 2 * sep.k_cap + 2;
    let n = c.n();
    let mut dist: HashMap<Vertex, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    for e in &t_edges {
        for v in [e.base, e.head()] {
            if dist.insert(v, 0).is_none() {
                queue.push_back(v);
            }
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for k in 0..n {
            let e = Edge {
                dir: k,
                base: v & !(1 << k),
            };
            if !t_edges.contains(&e) && edge_degree(c, &e) <= sep.light_max {
                return Ok(false);
            }
            let u = v ^ (1 << k);
            if d < radius && !dist.contains_key(&u) {
                dist.insert(u, d + 1);
                queue.push_back(u);
            }
        }
    }
    Ok(true)
}

pub const DEFAULT_HULL_MAX_DIM: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HullOptions {
    pub max_dim: u32,
    /// When a square that must be present is missing, add its lightest edge to `T`
    /// and keep growing instead of reporting that no hull exists.
    pub absorb_light: bool,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions {
            max_dim: DEFAULT_HULL_MAX_DIM,
            absorb_light: false,
        }
    }
}

/// `h(T)`: a cube whose 1-skeleton carries `T`, every square of `W` meeting `T`
/// in an edge, and every square of the cube that does not meet `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hull {
    pub cube: Face,
    /// Edges of `T` (grown if light edges were absorbed).
    pub t_edges: Vec<Edge>,
    /// 2-faces of `h(T)`: the squares of `W` inside the cube.
    pub faces: Vec<Square>,
}

fn touches(s: &Square, edges: &HashSet<Edge>) -> bool {
    s.edges().iter().any(|e| edges.contains(e))
}

/// Grows the smallest cube around `T = t_squares ∪ t_edges` until the hull conditions hold.
///
/// Returns `Ok(None)` when some square of the cube that avoids `T` is missing from `W`
/// (then no cube works) and `absorb_light` is off.
pub fn hull(w: &Complex, t_squares: &[Square], t_edges: &[Edge], opts: HullOptions) -> Result<Option<Hull>> {
    let n = w.n();
    let cube = w.cube();
    let mut edges: HashSet<Edge> = HashSet::new();
    for s in t_squares {
        Square::new(s.i, s.j, s.base, n)?;
        if !w.contains(s) {
            return arg_err(format!("square {s:?} of T is not in W"));
        }
        edges.extend(s.edges());
    }
    for e in t_edges {
        edges.insert(Edge::new(e.dir, e.base, n)?);
    }
    if edges.is_empty() {
        return arg_err("T must contain at least one edge");
    }
    let faces: Vec<Face> = edges.iter().map(|e| e.as_face()).collect();
    let mut x = box_span(&faces)?;
    loop {
        if x.dim() > opts.max_dim {
            return Err(Error::BoundedGrowth(format!(
                "hull reached dimension {} (cap {})",
                x.dim(),
                opts.max_dim
            )));
        }
        let mut grown = x;
        for e in &edges {
            for s in cube.squares_of_edge(e) {
                if w.contains(&s) && !grown.contains_square(&s) {
                    grown = box_span(&[grown, s.as_face()])?;
                }
            }
        }
        if grown != x {
            x = grown;
            continue;
        }
        let missing = x
            .squares()
            .into_iter()
            .find(|s| !touches(s, &edges) && !w.contains(s));
        let Some(missing) = missing else { break };
        if !opts.absorb_light {
            return Ok(None);
        }
        let lightest = missing
            .edges()
            .into_iter()
            .min_by_key(|e| (edge_degree(w, e), cube.edge_index(e)))
            .expect("four edges");
        edges.insert(lightest);
    }
    let mut t_edges: Vec<Edge> = edges.into_iter().collect();
    t_edges.sort_unstable_by_key(|e| cube.edge_index(e));
    let faces = x.squares().into_iter().filter(|s| w.contains(s)).collect();
    Ok(Some(Hull {
        cube: x,
        t_edges,
        faces,
    }))
}

/// Direct check of the hull conditions, independent of how `h` was found.
pub fn is_hull(w: &Complex, h: &Hull) -> bool {
    let edges: HashSet<Edge> = h.t_edges.iter().copied().collect();
    if !h.t_edges.iter().all(|e| h.cube.contains_edge(e)) {
        return false;
    }
    let incident_inside = w
        .present_squares()
        .filter(|s| touches(s, &edges))
        .all(|s| h.cube.contains_square(&s));
    let avoiding_present = h
        .cube
        .squares()
        .into_iter()
        .filter(|s| !touches(s, &edges))
        .all(|s| w.contains(&s));
    incident_inside && avoiding_present
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CleanCubeOptions {
    /// Degree bound for light edges; `None` skips the light-edge checks.
    pub light_max: Option<u64>,
    /// Maximum number of translates examined.
    pub budget: u64,
}

impl Default for CleanCubeOptions {
    fn default() -> Self {
        CleanCubeOptions {
            light_max: None,
            budget: 1 << 20,
        }
    }
}

/// Spreads the low bits of `v` over the set bits of `mask`.
fn deposit(v: u32, mask: u32) -> u32 {
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

/// Subsets of `mask` with exactly `m` bits, in increasing order.
fn subsets_of_size(mask: u32, m: u32) -> impl Iterator<Item = u32> {
    let width = mask.count_ones();
    let mut cur: Option<u64> = if m <= width { Some((1u64 << m) - 1) } else { None };
    std::iter::from_fn(move || {
        let c = cur?;
        if c >> width != 0 {
            return None;
        }
        cur = if c == 0 {
            None
        } else {
            // Gosper's hack
            let low = c & c.wrapping_neg();
            let ripple = c + low;
            Some((((ripple ^ c) >> 2) / low) | ripple)
        };
        Some(deposit(c as u32, mask))
    })
}

/// `H(T)`: a translate of the hull cube whose full 2-skeleton lies in `W`, such that
/// every square joining an edge of `h(T) \ T` to it is in `W`, and (optionally) with no
/// light edges in it or between it and the hull. Closer translates are tried first.
///
/// Presence is tested in the sampled `W` itself. A weaker reading would accept
/// squares of `W`'s heavy closure instead; that variant is not implemented.
pub fn clean_parallel_cube(w: &Complex, h: &Hull, opts: CleanCubeOptions) -> Result<Option<Face>> {
    let n = w.n();
    let free = !h.cube.stars & ((1u32 << n) - 1);
    let t_edges: HashSet<Edge> = h.t_edges.iter().copied().collect();
    let x_edges = h.cube.edges();
    let light = |e: &Edge| opts.light_max.is_some_and(|m| edge_degree(w, e) <= m);
    let mut examined = 0u64;
    for m in 1..=free.count_ones() {
        for delta in subsets_of_size(free, m) {
            examined += 1;
            if examined > opts.budget {
                return Err(Error::BoundedGrowth(format!(
                    "no clean parallel cube within {} translates",
                    opts.budget
                )));
            }
            let y = Face {
                stars: h.cube.stars,
                base: h.cube.base ^ delta,
            };
            if !y.squares().iter().all(|s| w.contains(s)) {
                continue;
            }
            if m == 1 {
                let d = delta.trailing_zeros();
                let joined = x_edges.iter().filter(|e| !t_edges.contains(e)).all(|e| {
                    let s = Square::new(e.dir, d, e.base & !(1 << d), n).expect("distinct coordinates");
                    w.contains(&s)
                });
                if !joined {
                    continue;
                }
            }
            if opts.light_max.is_some() {
                if y.edges().iter().any(&light) {
                    continue;
                }
                let span = box_span(&[h.cube, y])?;
                let between = span
                    .edges()
                    .into_iter()
                    .filter(|e| !h.cube.contains_edge(e) && !y.contains_edge(e))
                    .any(|e| light(&e));
                if between {
                    continue;
                }
            }
            return Ok(Some(y));
        }
    }
    Ok(None)
}

/// The complex around an edge `f`: the 1-skeletons of all 3-faces through `f`,
/// with every square on that skeleton except those containing `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bubble {
    pub n: u32,
    pub f: Edge,
    pub edges: Vec<Edge>,
    pub squares: Vec<Square>,
}

pub fn build_bubble(n: u32, f: Edge) -> Result<Bubble> {
    if n < 3 {
        return arg_err(format!("bubble needs n >= 3, got {n}"));
    }
    let cube = Cube::new(n)?;
    let f = Edge::new(f.dir, f.base, n)?;
    let others: Vec<u32> = (0..n).filter(|&k| k != f.dir).collect();
    let mut edges: HashSet<Edge> = HashSet::new();
    for (a, &i) in others.iter().enumerate() {
        for &j in &others[a + 1..] {
            let stars = (1 << f.dir) | (1 << i) | (1 << j);
            let c = Face {
                stars,
                base: f.base & !stars,
            };
            edges.extend(c.edges());
        }
    }
    let mut squares: HashSet<Square> = HashSet::new();
    for e in &edges {
        for s in cube.squares_of_edge(e) {
            if s.edges().iter().all(|x| edges.contains(x)) && !s.edges().contains(&f) {
                squares.insert(s);
            }
        }
    }
    let mut edges: Vec<Edge> = edges.into_iter().collect();
    edges.sort_unstable_by_key(|e| cube.edge_index(e));
    let mut squares: Vec<Square> = squares.into_iter().collect();
    squares.sort_unstable_by_key(|s| cube.square_index(s));
    Ok(Bubble { n, f, edges, squares })
}

impl Bubble {
    pub fn chain(&self) -> ChainComplex {
        ChainComplex::from_cells(self.n, &self.squares, &self.edges).expect("valid cells")
    }

    /// The same skeleton with one more square (typically one containing `f`).
    pub fn chain_with(&self, extra: Square) -> Result<ChainComplex> {
        let mut squares = self.squares.clone();
        squares.push(extra);
        ChainComplex::from_cells(self.n, &squares, &self.edges)
    }

    /// Squares of the ambient cube that contain `f`.
    pub fn squares_through_f(&self) -> Vec<Square> {
        let cube = Cube::new(self.n).expect("validated");
        cube.squares_of_edge(&self.f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{beta1_f2, integer_h1, snf_torsion};

    #[test]
    fn star_notation_roundtrip() {
        let (n, f) = parse_star("(*,0,1,*)").unwrap();
        assert_eq!(n, 4);
        assert_eq!(f, Face { stars: 0b1001, base: 0b0100 });
        assert_eq!(star_string(&f, 4), "(*,0,1,*)");
        assert!(parse_star("*,0").is_err());
        assert!(parse_star("(*,2)").is_err());
    }

    #[test]
    fn names_parse() {
        for name in WitnessName::ALL {
            assert_eq!(name.as_str().parse::<WitnessName>().unwrap(), name);
        }
        assert!("sphere".parse::<WitnessName>().is_err());
    }

    #[test]
    fn tables_recompute_stated_edge_counts() {
        for (name, squares) in [(WitnessName::Torus, 16), (WitnessName::Rp2, 20), (WitnessName::Klein, 28)] {
            let w = WitnessComplex::build(name).unwrap();
            assert_eq!(w.squares.len(), squares);
            assert_eq!(w.edge_count(), name.stated_edge_count());
            w.chain().verify().unwrap();
        }
    }

    #[test]
    fn thresholds_match_stated_decimals() {
        let t = |name| WitnessComplex::build(name).unwrap().threshold();
        assert!((t(WitnessName::Torus) - 0.021428).abs() < 5e-6);
        assert!((t(WitnessName::Rp2) - 0.017179).abs() < 5e-6);
        assert!((t(WitnessName::Klein) - 0.01230134).abs() < 5e-6);
    }

    #[test]
    fn witness_homology() {
        let torus = WitnessComplex::build(WitnessName::Torus).unwrap().chain();
        assert_eq!(beta1_f2(&torus), 2);
        assert_eq!(integer_h1(&torus).unwrap().free_rank, 2);
        assert!(snf_torsion(&torus).unwrap().is_empty());

        let rp2 = WitnessComplex::build(WitnessName::Rp2).unwrap().chain();
        assert_eq!(beta1_f2(&rp2), 1);
        let h = integer_h1(&rp2).unwrap();
        assert_eq!((h.free_rank, h.torsion), (0, vec![2]));

        let klein = WitnessComplex::build(WitnessName::Klein).unwrap().chain();
        assert_eq!(klein.num_squares(), 28);
        assert_eq!(beta1_f2(&klein), 2);
        let h = integer_h1(&klein).unwrap();
        assert_eq!((h.free_rank, h.torsion), (1, vec![2]));
    }

    #[test]
    fn embedding_validation() {
        assert!(Embedding::new(6, vec![0, 0], 0).is_err());
        assert!(Embedding::new(6, vec![0, 7], 0).is_err());
        assert!(Embedding::new(6, vec![0, 1], 0b1).is_err());
        let phi = Embedding::new(6, vec![5, 2], 0b1).unwrap();
        assert_eq!(phi.map_vertex(0b11), 0b100101);
        assert_eq!(
            phi.map_square(&Square::new(0, 1, 0, 2).unwrap()),
            Square { i: 2, j: 5, base: 1 }
        );
    }

    #[test]
    fn isolated_torus_occurs() {
        let t = WitnessComplex::build(WitnessName::Torus).unwrap();
        let phi = Embedding::identity(4, 6).unwrap();
        let c = t.to_complex(&phi).unwrap();
        assert!(witness_occurrence(&c, &t, &phi, None).unwrap());
        // one more face on an edge of T breaks isolation
        let extra = Square::new(0, 5, 0, 6).unwrap();
        let mut squares: Vec<Square> = c.present_squares().collect();
        squares.push(extra);
        let c2 = Complex::from_squares(6, &squares).unwrap();
        assert!(!witness_occurrence(&c2, &t, &phi, None).unwrap());
        // wrong ambient dimension
        let c7 = Complex::from_squares(7, &[]).unwrap();
        assert!(matches!(
            witness_occurrence(&c7, &t, &phi, None),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn separation_sees_nearby_light_edges() {
        let t = WitnessComplex::build(WitnessName::Torus).unwrap();
        let phi = Embedding::identity(4, 6).unwrap();
        let alone = t.to_complex(&phi).unwrap();
        // all other edges have degree 0
        let sep0 = Separation { light_max: 0, k_cap: 1 };
        assert!(!witness_occurrence(&alone, &t, &phi, Some(sep0)).unwrap());
        // add every square that is neither in the cube nor on an edge of T
        let k = occurrence_constraints(&t, &phi).unwrap();
        let absent: HashSet<Square> = k.absent.iter().copied().collect();
        let squares: Vec<Square> = Cube::new(6)
            .unwrap()
            .squares()
            .filter(|s| !absent.contains(s))
            .collect();
        let c = Complex::from_squares(6, &squares).unwrap();
        assert!(witness_occurrence(&c, &t, &phi, None).unwrap());
        // edges leaving the cube keep exactly one square
        assert!(witness_occurrence(&c, &t, &phi, Some(sep0)).unwrap());
        let sep1 = Separation { light_max: 1, k_cap: 1 };
        assert!(!witness_occurrence(&c, &t, &phi, Some(sep1)).unwrap());
    }

    #[test]
    fn constraint_sets_are_disjoint_and_complete() {
        let t = WitnessComplex::build(WitnessName::Rp2).unwrap();
        let phi = Embedding::new(8, vec![1, 3, 4, 6, 7], 0b101).unwrap();
        let k = occurrence_constraints(&t, &phi).unwrap();
        let present: HashSet<_> = k.present.iter().collect();
        assert!(k.absent.iter().all(|s| !present.contains(s)));
        // cube squares are all constrained; each T edge has 3 outside squares at N=8
        let x = t.enclosing_faces().len();
        assert_eq!(k.present.len(), x);
        assert_eq!(k.absent.len(), 80 - x + 40 * 3);
    }

    #[test]
    fn bubble_small_cases() {
        let b = build_bubble(3, Edge { dir: 0, base: 0 }).unwrap();
        assert_eq!(b.squares.len(), 4);
        assert_eq!(b.edges.len(), 12);
        for n in 3..=6 {
            let b = build_bubble(n, Edge { dir: 1, base: 0 }).unwrap();
            assert_eq!(beta1_f2(&b.chain()), 1, "n={n}");
            for s in b.squares_through_f() {
                assert_eq!(beta1_f2(&b.chain_with(s).unwrap()), 0);
            }
        }
        assert!(build_bubble(2, Edge { dir: 0, base: 0 }).is_err());
    }

    #[test]
    fn hull_of_an_isolated_square() {
        let s = Square::new(0, 2, 0b10, 5).unwrap();
        let w = Complex::from_squares(5, &[s]).unwrap();
        let h = hull(&w, &[s], &[], HullOptions::default()).unwrap().unwrap();
        assert_eq!(h.cube, s.as_face());
        assert_eq!(h.faces, vec![s]);
        assert!(is_hull(&w, &h));
    }

    #[test]
    fn hull_grows_to_meet_incident_faces() {
        let s = Square::new(0, 1, 0, 5).unwrap();
        let t = Square::new(0, 3, 0, 5).unwrap(); // shares edge (0, 0) with s
        let w = Complex::from_squares(5, &[s, t]).unwrap();
        let h = hull(&w, &[s], &[], HullOptions::default()).unwrap();
        // the 3-cube {0,1,3} has squares avoiding T that are absent from W
        assert_eq!(h, None);
        let mut squares = vec![s, t];
        let cube3 = box_span(&[s.as_face(), t.as_face()]).unwrap();
        let t_edges: HashSet<Edge> = s.edges().into_iter().collect();
        squares.extend(cube3.squares().into_iter().filter(|q| !touches(q, &t_edges)));
        let w = Complex::from_squares(5, &squares).unwrap();
        let h = hull(&w, &[s], &[], HullOptions::default()).unwrap().unwrap();
        assert_eq!(h.cube, cube3);
        assert!(is_hull(&w, &h));
    }

    #[test]
    fn hull_of_isolated_rp2_is_its_cube() {
        let t = WitnessComplex::build(WitnessName::Rp2).unwrap();
        let phi = Embedding::identity(5, 7).unwrap();
        let x: Vec<Square> = t.enclosing_faces().iter().map(|s| phi.map_square(s)).collect();
        let w = Complex::from_squares(7, &x).unwrap();
        let t_squares: Vec<Square> = t.squares.iter().map(|s| phi.map_square(s)).collect();
        let h = hull(&w, &t_squares, &[], HullOptions::default()).unwrap().unwrap();
        assert_eq!(h.cube, Face { stars: 0b11111, base: 0 });
        assert!(is_hull(&w, &h));
    }

    #[test]
    fn hull_cap_is_an_error() {
        let w = Complex::sample(8, 1.0, 0).unwrap();
        let e = Edge { dir: 0, base: 0 };
        let opts = HullOptions {
            max_dim: 4,
            absorb_light: false,
        };
        assert!(matches!(hull(&w, &[], &[e], opts), Err(Error::BoundedGrowth(_))));
    }

    #[test]
    fn absorbing_light_edges_always_yields_a_hull() {
        for seed in 0..10 {
            let w = Complex::sample(7, 0.6, seed).unwrap();
            let e = Edge { dir: 2, base: 0 };
            let opts = HullOptions {
                max_dim: 7,
                absorb_light: true,
            };
            let h = hull(&w, &[], &[e], opts).unwrap().unwrap();
            assert!(is_hull(&w, &h), "seed={seed}");
        }
    }

    #[test]
    fn clean_cube_in_a_full_complex() {
        let w = Complex::sample(6, 1.0, 0).unwrap();
        let s = Square::new(0, 1, 0, 6).unwrap();
        let h = Hull {
            cube: s.as_face(),
            t_edges: vec![],
            faces: vec![s],
        };
        let y = clean_parallel_cube(&w, &h, CleanCubeOptions::default()).unwrap().unwrap();
        assert_eq!(y, Face { stars: 0b11, base: 0b100 });
        let opts = CleanCubeOptions {
            light_max: Some(4),
            budget: 100,
        };
        assert!(clean_parallel_cube(&w, &h, opts).unwrap().is_some());
        let empty = Complex::from_squares(6, &[]).unwrap();
        assert_eq!(clean_parallel_cube(&empty, &h, CleanCubeOptions::default()).unwrap(), None);
        let tiny = CleanCubeOptions {
            light_max: None,
            budget: 2,
        };
        assert!(clean_parallel_cube(&empty, &h, tiny).is_err());
    }

    #[test]
    fn subset_enumeration() {
        let got: Vec<u32> = subsets_of_size(0b10110, 2).collect();
        assert_eq!(got, vec![0b00110, 0b10010, 0b10100]);
        assert_eq!(subsets_of_size(0b1, 2).count(), 0);
        assert_eq!(subsets_of_size(0b111, 0).collect::<Vec<_>>(), vec![0]);
    }
}
