//! Parallel homotopy contraction.
//!
//! Starting from the squares that bound 2-faces, each stage adds every square
//! whose component in `G(V_t)` contains a square of `V_t`. Every square reached
//! this way is null-homotopic in the complex, so the fixpoint `V_fix` is a
//! certificate set; the squares outside it are the survivors.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::complex::{Complex, EdgeDegreeTable};
use crate::cube::{Cube, Square};
use crate::error::{arg_err, Result};
use crate::parallel::{components, SquareSet};

pub const DEFAULT_MAX_STAGES: usize = 16;

/// One stage: the union of the components of `G(v)` that meet `v`.
pub fn stage(cube: &Cube, v: &SquareSet) -> SquareSet {
    let dec = components(cube, v, v);
    let mut next = FixedBitSet::with_capacity(cube.num_squares());
    for k in 0..cube.num_squares() {
        if dec.is_marked(dec.component_of(k)) {
            next.insert(k);
        }
    }
    SquareSet::from_bits(cube, next).expect("same length")
}

#[derive(Clone, Debug)]
pub struct ContractionTrace {
    /// `V_1, V_2, ...` up to the fixpoint; only the last entry unless all stages were kept.
    pub stages: Vec<SquareSet>,
    /// The first `t` with `V_{t+1} = V_t`, or the number of stages run if not converged.
    pub stage_count: usize,
    pub converged: bool,
    pub survivors: Vec<Square>,
    /// Minimum edge degree (in the original complex) over each survivor's four edges.
    pub survivor_min_degree: Vec<u8>,
}

impl ContractionTrace {
    pub fn fixpoint(&self) -> &SquareSet {
        self.stages.last().expect("at least one stage")
    }

    /// Whether every square was contracted.
    pub fn is_complete(&self) -> bool {
        self.survivors.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub max_stages: usize,
    pub keep_stages: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_stages: DEFAULT_MAX_STAGES,
            keep_stages: false,
        }
    }
}

pub fn run(c: &Complex, opts: RunOptions) -> Result<ContractionTrace> {
    if opts.max_stages == 0 {
        return arg_err("max_stages must be at least 1");
    }
    let cube = c.cube();
    let mut current = SquareSet::of_complex(c);
    let mut kept = Vec::new();
    let mut converged = false;
    let mut t = 0;
    while t < opts.max_stages {
        t += 1;
        let next = stage(cube, &current);
        debug_assert!(current.is_subset(&next));
        if next == current {
            converged = true;
            break;
        }
        if opts.keep_stages {
            kept.push(std::mem::replace(&mut current, next));
        } else {
            current = next;
        }
    }
    let degrees = c.edge_degrees();
    let survivors: Vec<Square> = current
        .bits()
        .zeroes()
        .map(|k| cube.square_at(k).expect("in range"))
        .collect();
    let survivor_min_degree = survivors.iter().map(|s| degrees.min_on_square(cube, s)).collect();
    kept.push(current);
    Ok(ContractionTrace {
        stages: kept,
        stage_count: t,
        converged,
        survivors,
        survivor_min_degree,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurvivorReport {
    pub survivors: usize,
    pub with_maximal_edge: usize,
    pub with_light_edge: usize,
}

impl SurvivorReport {
    pub fn all_have_light_edge(&self) -> bool {
        self.with_light_edge == self.survivors
    }
}

/// Counts survivors touching a degree-0 edge and a light edge (degree `<= light_max`).
pub fn survivor_report(trace: &ContractionTrace, light_max: u64) -> SurvivorReport {
    let with_maximal_edge = trace.survivor_min_degree.iter().filter(|&&d| d == 0).count();
    let with_light_edge = trace
        .survivor_min_degree
        .iter()
        .filter(|&&d| d as u64 <= light_max)
        .count();
    SurvivorReport {
        survivors: trace.survivors.len(),
        with_maximal_edge,
        with_light_edge,
    }
}

/// Serialized trace summary.
#[derive(Clone, Debug, Serialize)]
pub struct TraceSummary {
    pub n: u32,
    pub p: f64,
    pub seed: u64,
    pub stages: usize,
    pub converged: bool,
    pub survivors: usize,
    pub survivors_with_maximal_edge: usize,
    pub survivors_with_light_edge: usize,
}

impl TraceSummary {
    pub fn new(c: &Complex, trace: &ContractionTrace, light_max: u64) -> Self {
        let report = survivor_report(trace, light_max);
        TraceSummary {
            n: c.n(),
            p: c.p(),
            seed: c.seed(),
            stages: trace.stage_count,
            converged: trace.converged,
            survivors: report.survivors,
            survivors_with_maximal_edge: report.with_maximal_edge,
            survivors_with_light_edge: report.with_light_edge,
        }
    }
}

/// Squares all of whose edges have degree greater than `light_max`.
pub fn all_heavy_squares(cube: &Cube, degrees: &EdgeDegreeTable, light_max: u64) -> Vec<Square> {
    cube.squares()
        .filter(|s| degrees.min_on_square(cube, s) as u64 > light_max)
        .collect()
}
