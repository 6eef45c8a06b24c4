//! Monte Carlo drivers: per-trial statistics, sweeps over `p`, the Poisson
//! regime report and the fixed-seed verification suites.
//!
//! Trial `t` of a run with master seed `m` samples with seed
//! `splitmix64(m + t)`, so every `p` in a sweep sees the same coupled draws.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{gs_bound, gs_exact};
use crate::complex::{Complex, Thresholds};
use crate::contraction::{self, RunOptions};
use crate::cube::{binomial, Cube};
use crate::error::{arg_err, Error, Result};
use crate::homology::{beta1_f2, integer_h1, ChainComplex};
use crate::parallel::{component_subgraph_law_check, components, SquareSet};
use crate::rng::trial_seed;
use crate::stats::Summary;
use crate::witness::{WitnessComplex, WitnessName};

/// Runs `f(trial_index, trial_seed)` for every trial on the current rayon pool.
/// Results come back in trial order regardless of completion order.
pub fn map_trials<T, F>(trials: u64, master_seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(t, trial_seed(master_seed, t)))
        .collect()
}

/// `E[#maximal edges] = 2^(n-1) n (1-p)^(n-1)`.
pub fn expected_maximal_count(n: u32, p: f64) -> f64 {
    2f64.powi(n as i32 - 1) * n as f64 * (1.0 - p).powi(n as i32 - 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stat {
    FaceCount,
    MaximalCount,
    Beta1,
    SurvivorCount,
    StageCount,
    /// 1 when the contraction fixpoint is every square, else 0.
    VfixFull,
}

impl Stat {
    pub const ALL: [Stat; 6] = [
        Stat::FaceCount,
        Stat::MaximalCount,
        Stat::Beta1,
        Stat::SurvivorCount,
        Stat::StageCount,
        Stat::VfixFull,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stat::FaceCount => "face-count",
            Stat::MaximalCount => "maximal-count",
            Stat::Beta1 => "beta1",
            Stat::SurvivorCount => "survivor-count",
            Stat::StageCount => "stage-count",
            Stat::VfixFull => "vfix-full",
        }
    }

    /// Value of the statistic on one sampled complex.
    pub fn measure(&self, c: &Complex, max_stages: usize) -> Result<f64> {
        let contract = || {
            contraction::run(
                c,
                RunOptions {
                    max_stages,
                    keep_stages: false,
                },
            )
        };
        Ok(match self {
            Stat::FaceCount => c.face_count() as f64,
            Stat::MaximalCount => c.maximal_edges().len() as f64,
            Stat::Beta1 => beta1_f2(&ChainComplex::from_complex(c)) as f64,
            Stat::SurvivorCount => contract()?.survivors.len() as f64,
            Stat::StageCount => contract()?.stage_count as f64,
            Stat::VfixFull => {
                let t = contract()?;
                if t.converged && t.is_complete() {
                    1.0
                } else {
                    0.0
                }
            }
        })
    }
}

impl fmt::Display for Stat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stat::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Stat::ALL.iter().map(|s| s.as_str()).collect();
                Error::Argument(format!("unknown statistic {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

pub const CSV_HEADER: &str = "n,p,trials,stat,mean,stddev,stderr,min,max";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: u32,
    pub p: f64,
    pub trials: u64,
    pub stat: Stat,
    pub mean: f64,
    pub stddev: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
}

impl SweepRow {
    pub fn from_summary(n: u32, p: f64, stat: Stat, s: &Summary) -> Self {
        SweepRow {
            n,
            p,
            trials: s.count(),
            stat,
            mean: s.mean(),
            stddev: s.stddev(),
            stderr: s.stderr(),
            min: s.min(),
            max: s.max(),
        }
    }
}

/// `start, start + step, ...` up to `end` (inclusive, with a little float slack).
pub fn p_range(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 {
        return arg_err(format!("step must be positive, got {step}"));
    }
    if !(0.0..=1.0).contains(&start) || !(0.0..=1.0).contains(&end) || end < start {
        return arg_err(format!("range {start}..={end} must lie in [0, 1] and be nondecreasing"));
    }
    let count = ((end - start) / step + 1e-9).floor() as u64;
    Ok((0..=count)
        .map(|k| {
            let p = start + k as f64 * step;
            // strip accumulated binary noise so printed values stay short
            ((p * 1e12).round() / 1e12).min(1.0)
        })
        .collect())
}

pub fn run_stat(n: u32, p: f64, trials: u64, master_seed: u64, stat: Stat, max_stages: usize) -> Result<Summary> {
    if trials == 0 {
        return arg_err("trials must be at least 1");
    }
    let values = map_trials(trials, master_seed, |_, seed| {
        stat.measure(&Complex::sample(n, p, seed)?, max_stages)
    })?;
    Ok(Summary::from_values(values))
}

pub fn sweep(n: u32, ps: &[f64], trials: u64, master_seed: u64, stat: Stat, max_stages: usize) -> Result<Vec<SweepRow>> {
    ps.iter()
        .map(|&p| {
            let s = run_stat(n, p, trials, master_seed, stat, max_stages)?;
            Ok(SweepRow::from_summary(n, p, stat, &s))
        })
        .collect()
}

/// A gnuplot script plotting `mean ± stderr` against `p` from a sweep CSV.
pub fn plot_script(csv_path: &str, stat: Stat, n: u32) -> String {
    format!(
        "# plot {stat} against p from {csv_path}\n\
         set datafile separator ','\n\
         set key top right\n\
         set xlabel 'p'\n\
         set ylabel '{stat}'\n\
         set title 'n = {n}'\n\
         set terminal pngcairo size 900,600\n\
         set output '{csv_path}.png'\n\
         plot '{csv_path}' skip 1 using 2:5:7 with yerrorlines title '{stat} (mean ± stderr)'\n"
    )
}

/// `p = (1 + (ln n + c) / n) / 2`. At this `p` the maximal-edge count tends to
/// Poisson with mean `e^(-c)`, so `Pr(k) -> e^(-ck) exp(-e^(-c)) / k!`; note the
/// negative exponent, which is sometimes misprinted as `e^(ck)`.
pub fn poisson_p(n: u32, c: f64) -> Result<f64> {
    if n < 2 {
        return arg_err(format!("n={n} too small"));
    }
    let p = 0.5 * (1.0 + ((n as f64).ln() + c) / n as f64);
    if !(0.0..=1.0).contains(&p) {
        return arg_err(format!("p={p} from n={n}, c={c} is outside [0, 1]"));
    }
    Ok(p)
}

pub const POISSON_MIN_TRIALS: u64 = 1000;

#[derive(Clone, Debug, Serialize)]
pub struct PoissonReport {
    pub n: u32,
    pub c: f64,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub mean: f64,
    pub stderr: f64,
    /// Exact expectation at this `n` and `p`.
    pub expected_mean: f64,
    /// Limiting mean `e^(-c)`.
    pub limit_mean: f64,
    pub pr_zero: f64,
    /// Limiting `Pr(count = 0) = exp(-e^(-c))`.
    pub limit_pr_zero: f64,
    /// `histogram[k]` = number of trials with exactly `k` maximal edges.
    pub histogram: Vec<u64>,
}

pub fn poisson(n: u32, c: f64, trials: u64, master_seed: u64) -> Result<PoissonReport> {
    if trials < POISSON_MIN_TRIALS {
        return arg_err(format!("poisson needs at least {POISSON_MIN_TRIALS} trials, got {trials}"));
    }
    let p = poisson_p(n, c)?;
    let counts = map_trials(trials, master_seed, |_, seed| {
        Ok(Complex::sample(n, p, seed)?.maximal_edges().len())
    })?;
    let top = counts.iter().copied().max().unwrap_or(0);
    let mut histogram = vec![0u64; top + 1];
    for &k in &counts {
        histogram[k] += 1;
    }
    let s = Summary::from_values(counts.iter().map(|&k| k as f64));
    Ok(PoissonReport {
        n,
        c,
        p,
        trials,
        seed: master_seed,
        mean: s.mean(),
        stderr: s.stderr(),
        expected_mean: expected_maximal_count(n, p),
        limit_mean: (-c).exp(),
        pr_zero: histogram[0] as f64 / trials as f64,
        limit_pr_zero: (-(-c).exp()).exp(),
        histogram,
    })
}

/// `(β₁(C), β₁(C with every fixpoint square filled))`.
pub fn soundness_pair(c: &Complex) -> Result<(u64, u64)> {
    let trace = contraction::run(c, RunOptions::default())?;
    let filled = c.with_added(trace.fixpoint().bits());
    Ok((
        beta1_f2(&ChainComplex::from_complex(c)),
        beta1_f2(&ChainComplex::from_complex(&filled)),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Partition,
    EdgeProb,
    Gs,
    Witness,
    Soundness,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Partition, Check::EdgeProb, Check::Gs, Check::Witness, Check::Soundness];

    pub fn as_str(&self) -> &'static str {
        match self {
            Check::Partition => "partition",
            Check::EdgeProb => "edge-prob",
            Check::Gs => "gs",
            Check::Witness => "witness",
            Check::Soundness => "soundness",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| {
            Error::Argument(format!(
                "unknown check {s:?}; expected partition, edge-prob, gs, witness or soundness"
            ))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub check: Check,
    pub seed: u64,
    pub passed: bool,
    pub note: &'static str,
    pub lines: Vec<CheckLine>,
}

const STAT_NOTE: &str = "statistical lines pass within 3 standard errors (about 0.3% false-failure rate each)";

fn line(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> CheckLine {
    CheckLine {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

/// Runs one verification suite with fixed seeds derived from `seed`.
pub fn verify(check: Check, seed: u64) -> Result<VerifyReport> {
    let lines = match check {
        Check::Partition => verify_partition()?,
        Check::EdgeProb => verify_edge_prob(seed)?,
        Check::Gs => verify_gs()?,
        Check::Witness => verify_witness()?,
        Check::Soundness => verify_soundness(seed)?,
    };
    Ok(VerifyReport {
        check,
        seed,
        passed: lines.iter().all(|l| l.passed),
        note: STAT_NOTE,
        lines,
    })
}

fn verify_partition() -> Result<Vec<CheckLine>> {
    (4..=8u32)
        .map(|n| {
            let cube = Cube::new(n)?;
            let full = SquareSet::full(&cube);
            let dec = components(&cube, &full, &full);
            let want = binomial(n as u64, 2) as usize;
            let sizes_ok = dec.sizes().iter().all(|&s| s == 1 << (n - 2));
            Ok(line(
                format!("partition n={n}"),
                dec.count() == want && sizes_ok,
                format!("{} components (expected {want}), all of size 2^{}: {sizes_ok}", dec.count(), n - 2),
            ))
        })
        .collect()
}

fn verify_edge_prob(seed: u64) -> Result<Vec<CheckLine>> {
    let r = component_subgraph_law_check(7, 0.7, 2000, seed)?;
    let e = r.edge_frequency;
    let c = r.color_degree_correlation;
    Ok(vec![
        line(
            "edge frequency n=7 p=0.7",
            (e.mean - r.expected_edge_frequency).abs() <= 3.0 * e.stderr,
            format!("{:.5} ± {:.5} vs p^4 = {:.4}", e.mean, e.stderr, r.expected_edge_frequency),
        ),
        line(
            "colour/degree correlation",
            c.mean.abs() <= 3.0 * c.stderr,
            format!("{:.5} ± {:.5} vs 0", c.mean, c.stderr),
        ),
    ])
}

fn verify_gs() -> Result<Vec<CheckLine>> {
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for n in 1..=5u32 {
        for s in 1..=5u32.min(1 << n) {
            for k in 1..=9 {
                let p = k as f64 / 10.0;
                let exact = gs_exact(n, p, s)?;
                let bound = gs_bound(n, p, s as u64)?;
                worst = worst.max(exact / bound);
                if exact > bound * (1.0 + 1e-12) {
                    failures.push(format!("n={n} s={s} p={p}"));
                }
            }
        }
    }
    Ok(vec![line(
        "g(s) exact <= bound, n<=5, s<=5, p in 0.1..0.9",
        failures.is_empty(),
        if failures.is_empty() {
            format!("largest exact/bound ratio {worst:.3e}")
        } else {
            format!("violations: {}", failures.join("; "))
        },
    )])
}

fn verify_witness() -> Result<Vec<CheckLine>> {
    let expected = [
        (WitnessName::Torus, 0.021428, 2u64, vec![]),
        (WitnessName::Rp2, 0.017179, 0, vec![2u64]),
        (WitnessName::Klein, 0.01230134, 1, vec![2]),
    ];
    let mut out = Vec::new();
    for (name, threshold, free, torsion) in expected {
        let w = WitnessComplex::build(name)?;
        let e = w.edge_count();
        out.push(line(
            format!("{name} edges"),
            e == name.stated_edge_count(),
            format!("{e} edges"),
        ));
        let h = integer_h1(&w.chain())?;
        out.push(line(
            format!("{name} homology"),
            h.free_rank == free && h.torsion == torsion,
            format!("free rank {}, torsion {:?}", h.free_rank, h.torsion),
        ));
        let t = w.threshold();
        out.push(line(
            format!("{name} threshold"),
            (t - threshold).abs() < 5e-6,
            format!("{t:.8} vs {threshold}"),
        ));
    }
    Ok(out)
}

fn verify_soundness(seed: u64) -> Result<Vec<CheckLine>> {
    let mut out = Vec::new();
    for n in 6..=9u32 {
        for p in [0.3, 0.5, 0.7] {
            let pairs = map_trials(100, seed, |_, s| soundness_pair(&Complex::sample(n, p, s)?))?;
            let bad = pairs.iter().filter(|(a, b)| a != b).count();
            out.push(line(
                format!("soundness n={n} p={p}"),
                bad == 0,
                format!("{bad} of 100 seeds changed beta1"),
            ));
        }
    }
    Ok(out)
}

/// Light-edge threshold when `p` is strictly inside `(0, 1)`.
pub fn light_threshold(p: f64) -> Option<u64> {
    Thresholds::compute(p).ok().map(|t| t.m_p)
}

#[derive(Clone, Debug, Serialize)]
pub struct StatsReport {
    pub n: u32,
    pub p: f64,
    pub seed: u64,
    pub faces: usize,
    pub maximal_edges: usize,
    /// `None` outside `0 < p < 1`, where the light-edge threshold is undefined.
    pub m_p: Option<u64>,
    pub light_edges: Option<usize>,
    pub beta1_f2: u64,
}

pub fn stats_report(c: &Complex) -> StatsReport {
    let m_p = light_threshold(c.p());
    let degrees = c.edge_degrees();
    StatsReport {
        n: c.n(),
        p: c.p(),
        seed: c.seed(),
        faces: c.face_count(),
        maximal_edges: degrees.count_where(|d| d == 0),
        m_p,
        light_edges: m_p.map(|m| degrees.count_where(|d| d as u64 <= m)),
        beta1_f2: beta1_f2(&ChainComplex::from_complex(c)),
    }
}
