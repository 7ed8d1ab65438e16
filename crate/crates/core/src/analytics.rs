//! Whole-graph measurements: connectivity, cage statistics, walk sampling,
//! spectral moments and per-prime experiment campaigns.

use std::collections::HashMap;
use std::io::Write;

use petgraph::unionfind::UnionFind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{enumerate_surface, EnumerationError, SurfaceEnumeration};
use crate::factor::{smoothness_check, FactorError, GroupOrders, SmoothnessReport};
use crate::field::{is_prime_u64, PrimeModulus};
use crate::pathfinder::{mix_seed, random_vertex, ClimbPolicy, PathError, PathFinder, ScanMode};
use crate::rotation::RotationOrders;
use crate::surface::{GraphKind, MarkoffTriple, Move};

/// Largest modulus whose moments are computed exactly.
pub const EXACT_TRACE_LIMIT: u64 = 101;
/// Random probe vectors per randomized trace estimate.
pub const DEFAULT_TRACE_SAMPLES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalyticsError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub count: usize,
    /// Component sizes, largest first.
    pub sizes: Vec<usize>,
}

pub fn components(p: &PrimeModulus, graph: GraphKind) -> Result<ComponentSummary, AnalyticsError> {
    Ok(components_of(&enumerate_surface(p)?, graph))
}

pub fn components_of(e: &SurfaceEnumeration, graph: GraphKind) -> ComponentSummary {
    let mut uf = UnionFind::<u32>::new(e.len());
    for (u, row) in e.adjacency(graph).iter().enumerate() {
        for &v in row {
            uf.union(u as u32, v);
        }
    }
    let mut sizes: HashMap<u32, usize> = HashMap::new();
    for root in uf.into_labeling() {
        *sizes.entry(root).or_default() += 1;
    }
    let mut sizes: Vec<usize> = sizes.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    ComponentSummary {
        count: sizes.len(),
        sizes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CageStats {
    pub p: u64,
    pub vertex_count: u64,
    pub cage_size: u64,
    pub proportion: f64,
}

pub fn cage_stats(p: &PrimeModulus) -> Result<CageStats, AnalyticsError> {
    let orders = RotationOrders::new(p).map_err(PathError::from)?;
    Ok(cage_stats_of(&enumerate_surface(p)?, &orders))
}

pub fn cage_stats_of(e: &SurfaceEnumeration, orders: &RotationOrders) -> CageStats {
    let cage_size = e.vertices().par_iter().filter(|t| orders.in_cage(t)).count() as u64;
    let vertex_count = e.len() as u64;
    CageStats {
        p: e.modulus().get(),
        vertex_count,
        cage_size,
        proportion: cage_size as f64 / vertex_count as f64,
    }
}

/// Endpoint of a seeded non-backtracking walk of `length` forward rotations
/// from `(1,1,1)`.
pub fn sample_vertex(p: &PrimeModulus, length: u64, seed: u64) -> MarkoffTriple {
    *sample_walk(p, length, seed).last().expect("walk holds its start")
}

/// The vertices of the walk behind [`sample_vertex`], start included. Each
/// step picks uniformly among the rotations that do not return to the
/// previous vertex.
pub fn sample_walk(p: &PrimeModulus, length: u64, seed: u64) -> Vec<MarkoffTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, &[p.get(), length]));
    let mut walk = vec![MarkoffTriple::ONES];
    for t in 0..length as usize {
        let current = walk[t];
        let previous = t.checked_sub(1).map(|s| walk[s]);
        let steps = (1..=3u8).map(|i| current.apply(p, Move::rotation(i)));
        let mut choices: Vec<MarkoffTriple> = steps.clone().filter(|v| Some(*v) != previous).collect();
        if choices.is_empty() {
            choices = steps.collect();
        }
        walk.push(choices[rng.gen_range(0..choices.len())]);
    }
    walk
}

/// Fraction of `trials` walk samples of each length that land in the cage.
pub fn sample_cage_fraction(
    orders: &RotationOrders,
    lengths: &[u64],
    trials: u64,
    seed: u64,
) -> Vec<(u64, f64)> {
    let p = orders.modulus();
    lengths
        .iter()
        .map(|&l| {
            let hits = (0..trials)
                .into_par_iter()
                .filter(|&t| orders.in_cage(&sample_vertex(p, l, mix_seed(seed, &[t]))))
                .count();
            (l, hits as f64 / trials.max(1) as f64)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub l: u32,
    /// `trace(A^L) / n` for the involution graph.
    pub graph_moment: f64,
    pub km_moment: f64,
    /// Standard error of a randomized estimate; `None` when exact.
    pub std_error: Option<f64>,
}

/// Moments of the involution graph's adjacency against the 3-regular
/// Kesten–McKay law. Exact for `p ≤ EXACT_TRACE_LIMIT`, randomized above.
pub fn spectrum_moments(p: &PrimeModulus, l_max: u32, seed: u64) -> Result<Vec<MomentRow>, AnalyticsError> {
    let e = enumerate_surface(p)?;
    Ok(spectrum_moments_of(&e, l_max, seed, DEFAULT_TRACE_SAMPLES))
}

pub fn spectrum_moments_of(e: &SurfaceEnumeration, l_max: u32, seed: u64, samples: usize) -> Vec<MomentRow> {
    let n = e.len() as f64;
    let traces: Vec<(f64, Option<f64>)> = if e.modulus().get() <= EXACT_TRACE_LIMIT {
        exact_traces(e, l_max).into_iter().map(|t| (t as f64, None)).collect()
    } else {
        randomized_traces(e, l_max, seed, samples)
            .into_iter()
            .map(|(mean, se)| (mean, Some(se)))
            .collect()
    };
    traces
        .into_iter()
        .enumerate()
        .map(|(l, (trace, se))| MomentRow {
            l: l as u32,
            graph_moment: trace / n,
            km_moment: km_moment(l as u32),
            std_error: se.map(|s| s / n),
        })
        .collect()
}

/// `trace(A^L)` for `L = 0..=l_max`, as `Σ_u Σ_v (A^a)_{uv} (A^b)_{uv}` with
/// `a + b = L`, using that `A` is symmetric.
pub fn exact_traces(e: &SurfaceEnumeration, l_max: u32) -> Vec<u128> {
    let adj = e.adjacency(GraphKind::G);
    let half = l_max.div_ceil(2) as usize;
    let per_vertex: Vec<Vec<u128>> = (0..e.len() as u32)
        .into_par_iter()
        .map(|u| {
            let mut layers: Vec<HashMap<u32, u128>> = vec![HashMap::from([(u, 1)])];
            for t in 0..half {
                let mut next: HashMap<u32, u128> = HashMap::new();
                for (&v, &c) in &layers[t] {
                    for &w in &adj[v as usize] {
                        *next.entry(w).or_default() += c;
                    }
                }
                layers.push(next);
            }
            (0..=l_max as usize)
                .map(|l| {
                    let (a, b) = (l / 2, l - l / 2);
                    layers[a]
                        .iter()
                        .map(|(v, c)| c * layers[b].get(v).copied().unwrap_or(0))
                        .sum()
                })
                .collect()
        })
        .collect();
    (0..=l_max as usize).map(|l| per_vertex.iter().map(|row| row[l]).sum()).collect()
}

/// Hutchinson estimates `(mean, standard error)` of `trace(A^L)` from
/// Rademacher probes.
pub fn randomized_traces(e: &SurfaceEnumeration, l_max: u32, seed: u64, samples: usize) -> Vec<(f64, f64)> {
    let adj = e.adjacency(GraphKind::G);
    let half = l_max.div_ceil(2) as usize;
    let estimates: Vec<Vec<f64>> = (0..samples)
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, &[e.modulus().get(), s as u64]));
            let z: Vec<f64> = (0..e.len()).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            let mut powers = vec![z];
            for t in 0..half {
                let prev = &powers[t];
                let next: Vec<f64> = adj.par_iter().map(|row| row.iter().map(|&w| prev[w as usize]).sum()).collect();
                powers.push(next);
            }
            (0..=l_max as usize)
                .map(|l| {
                    let (a, b) = (&powers[l / 2], &powers[l - l / 2]);
                    // sequential so the float sum is reproducible
                    a.iter().zip(b).map(|(x, y)| x * y).sum()
                })
                .collect()
        })
        .collect();
    (0..=l_max as usize)
        .map(|l| {
            let values: Vec<f64> = estimates.iter().map(|row| row[l]).collect();
            let m = values.len() as f64;
            let mean = values.iter().sum::<f64>() / m;
            let var = if m > 1.0 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
            } else {
                0.0
            };
            (mean, (var / m).sqrt())
        })
        .collect()
}

/// Combinatorial count of closed 2-walks: `3n + Σ_{u,v} m_uv (m_uv - 1)`,
/// where `m_uv` counts the moves from `u` to `v`.
pub fn closed_two_walks(e: &SurfaceEnumeration) -> u128 {
    let adj = e.adjacency(GraphKind::G);
    let extra: u128 = adj
        .iter()
        .map(|row| {
            let mut m = 0u128;
            for a in 0..3 {
                for b in 0..3 {
                    if a != b && row[a] == row[b] {
                        m += 1;
                    }
                }
            }
            m
        })
        .sum();
    3 * adj.len() as u128 + extra
}

/// `∫ x^L ρ₃(x) dx` over `[-2√2, 2√2]`, where `ρ₃` is the 3-regular
/// Kesten–McKay density. With `x = 2√2 sin θ` the integrand is smooth.
pub fn km_moment(l: u32) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    let r = 2.0 * 2f64.sqrt();
    let f = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let x = r * s;
        x.powi(l as i32) * 3.0 * 8.0 * c * c / (2.0 * std::f64::consts::PI * (9.0 - x * x))
    };
    let half_pi = std::f64::consts::FRAC_PI_2;
    adaptive_simpson(&f, -half_pi, half_pi, 1e-13, 50)
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, eps, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
}

/// Pearson correlation; `None` for fewer than two points or zero variance.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    (sxx > 0.0 && syy > 0.0).then(|| sxy / (sxx * syy).sqrt())
}

/// Least-squares slope of `ys` on `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Primes in `[lo, hi]` that are at least 5.
pub fn primes_in(lo: u64, hi: u64) -> Vec<PrimeModulus> {
    (lo.max(5)..=hi)
        .filter(|&n| is_prime_u64(n))
        .filter_map(|n| PrimeModulus::new(n).ok())
        .collect()
}

/// Security-parameter screen for one prime.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamReport {
    pub p: u64,
    pub bit_len: u32,
    pub eta_p: u64,
    pub smoothness_pass: bool,
    pub worst_y: String,
    pub worst_ratio: f64,
    pub lower_bound: f64,
    pub suitable: bool,
    pub summary: String,
}

pub fn param_check(p: &PrimeModulus) -> Result<ParamReport, AnalyticsError> {
    let groups = GroupOrders::new(p)?;
    let SmoothnessReport {
        passes,
        worst_y,
        worst_ratio,
        lower_bound,
    } = smoothness_check(p)?;
    let eta_p = groups.p_squared_minus_1.divisor_count();
    let summary = if passes {
        format!("p^2 - 1 passes the divisor-sum screen; eta_p = {eta_p}")
    } else {
        format!("divisor-sum screen fails at y = {worst_y} (ratio {worst_ratio:.3}); eta_p = {eta_p}")
    };
    Ok(ParamReport {
        p: p.get(),
        bit_len: p.bit_len(),
        eta_p,
        smoothness_pass: passes,
        worst_y: worst_y.to_string(),
        worst_ratio,
        lower_bound,
        suitable: passes,
        summary,
    })
}

/// Settings shared by every prime of a campaign.
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    /// Random vertex pairs per prime.
    pub trials: u64,
    pub seed: u64,
    /// Record wall-clock times; off keeps the output byte-deterministic.
    pub timing: bool,
    pub graph: GraphKind,
    pub mode: ScanMode,
    pub components: bool,
    /// Moment orders to report; empty skips the spectrum.
    pub moment_orders: Vec<u32>,
    pub trace_samples: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 0,
            timing: false,
            graph: GraphKind::GHat,
            mode: ScanMode::FullOrbit,
            components: true,
            moment_orders: vec![2, 4, 6],
            trace_samples: 4,
        }
    }
}

/// Measurements for one prime. Fields a failed stage could not fill are
/// `None` and `error` says why.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticsRecord {
    pub p: u64,
    pub vertex_count: Option<u64>,
    pub component_count: Option<usize>,
    pub cage_size: Option<u64>,
    pub cage_proportion: Option<f64>,
    pub eta_p: Option<u64>,
    pub smoothness_pass: Option<bool>,
    pub avg_path_len: Option<f64>,
    pub max_path_len: Option<u64>,
    pub length_bound: Option<u128>,
    pub avg_ms: Option<f64>,
    /// `(L, graph moment, Kesten–McKay moment)`.
    pub moments: Vec<(u32, f64, f64)>,
    pub error: Option<String>,
}

impl AnalyticsRecord {
    fn empty(p: u64) -> Self {
        Self {
            p,
            vertex_count: None,
            component_count: None,
            cage_size: None,
            cage_proportion: None,
            eta_p: None,
            smoothness_pass: None,
            avg_path_len: None,
            max_path_len: None,
            length_bound: None,
            avg_ms: None,
            moments: Vec::new(),
            error: None,
        }
    }
}

/// Runs every prime independently; records come back in input order.
pub fn experiment_campaign(primes: &[PrimeModulus], config: &CampaignConfig) -> Vec<AnalyticsRecord> {
    primes.par_iter().map(|p| prime_record(p, config)).collect()
}

fn prime_record(p: &PrimeModulus, config: &CampaignConfig) -> AnalyticsRecord {
    let mut rec = AnalyticsRecord::empty(p.get());
    if let Err(e) = fill_record(p, config, &mut rec) {
        rec.error = Some(e.to_string());
    }
    rec
}

fn fill_record(p: &PrimeModulus, config: &CampaignConfig, rec: &mut AnalyticsRecord) -> Result<(), AnalyticsError> {
    let finder = PathFinder::new(p)?;
    rec.eta_p = Some(finder.orders().groups().p_squared_minus_1.divisor_count());
    rec.smoothness_pass = Some(smoothness_check(p)?.passes);
    rec.length_bound = Some(finder.path_length_bound());

    let policy = ClimbPolicy {
        mode: config.mode,
        ..ClimbPolicy::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed, &[p.get()]));
    let (mut total_len, mut total_ms, mut max_len) = (0u64, 0f64, 0u64);
    for _ in 0..config.trials {
        let x = random_vertex(p, &mut rng);
        let y = random_vertex(p, &mut rng);
        let (_, run) = finder.measure_run(&x, &y, config.graph, &policy)?;
        total_len += run.path_length;
        total_ms += run.wall_time_ms;
        max_len = max_len.max(run.path_length);
    }
    if config.trials > 0 {
        rec.avg_path_len = Some(total_len as f64 / config.trials as f64);
        rec.max_path_len = Some(max_len);
        if config.timing {
            rec.avg_ms = Some(total_ms / config.trials as f64);
        }
    }

    let e = enumerate_surface(p)?;
    rec.vertex_count = Some(e.len() as u64);
    let cage = cage_stats_of(&e, finder.orders());
    rec.cage_size = Some(cage.cage_size);
    rec.cage_proportion = Some(cage.proportion);
    if config.components {
        rec.component_count = Some(components_of(&e, GraphKind::GHat).count);
    }
    if let Some(&l_max) = config.moment_orders.iter().max() {
        let rows = spectrum_moments_of(&e, l_max, config.seed, config.trace_samples);
        rec.moments = config
            .moment_orders
            .iter()
            .map(|&l| {
                let r = rows[l as usize];
                (l, r.graph_moment, r.km_moment)
            })
            .collect();
    }
    Ok(())
}

#[derive(Serialize)]
struct AnalyticsCsvRow<'a> {
    p: u64,
    vertex_count: Option<u64>,
    component_count: Option<usize>,
    cage_size: Option<u64>,
    cage_proportion: Option<f64>,
    eta_p: Option<u64>,
    smoothness_pass: Option<bool>,
    avg_path_len: Option<f64>,
    max_path_len: Option<u64>,
    length_bound: Option<String>,
    avg_ms: Option<f64>,
    moments: String,
    error: Option<&'a str>,
}

/// Column order of [`write_analytics_csv`].
pub const ANALYTICS_COLUMNS: [&str; 13] = [
    "p",
    "vertex_count",
    "component_count",
    "cage_size",
    "cage_proportion",
    "eta_p",
    "smoothness_pass",
    "avg_path_len",
    "max_path_len",
    "length_bound",
    "avg_ms",
    "moments",
    "error",
];

/// Moments are packed as `L:graph:km` separated by `;`.
pub fn write_analytics_csv<W: Write>(records: &[AnalyticsRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(ANALYTICS_COLUMNS)?;
    for r in records {
        let moments = r
            .moments
            .iter()
            .map(|(l, g, k)| format!("{l}:{g:.9}:{k:.9}"))
            .collect::<Vec<_>>()
            .join(";");
        w.serialize(AnalyticsCsvRow {
            p: r.p,
            vertex_count: r.vertex_count,
            component_count: r.component_count,
            cage_size: r.cage_size,
            cage_proportion: r.cage_proportion,
            eta_p: r.eta_p,
            smoothness_pass: r.smoothness_pass,
            avg_path_len: r.avg_path_len,
            max_path_len: r.max_path_len,
            length_bound: r.length_bound.map(|b| b.to_string()),
            avg_ms: r.avg_ms,
            moments,
            error: r.error.as_deref(),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct BenchCsvRow {
    p: u64,
    eta_p: Option<u64>,
    avg_len: Option<f64>,
    avg_ms: Option<f64>,
    cage_prop: Option<f64>,
}

pub const BENCH_COLUMNS: [&str; 5] = ["p", "eta_p", "avg_len", "avg_ms", "cage_prop"];

pub fn write_bench_csv<W: Write>(records: &[AnalyticsRecord], out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(BENCH_COLUMNS)?;
    for r in records {
        w.serialize(BenchCsvRow {
            p: r.p,
            eta_p: r.eta_p,
            avg_len: r.avg_path_len,
            avg_ms: r.avg_ms,
            cage_prop: r.cage_proportion,
        })?;
    }
    w.flush()?;
    Ok(())
}
