//! Random weighted and simple graphs sampled from step kernel-signals, and a
//! Monte Carlo estimate of the expected cut distance to the sample.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alignment::{cut_distance, AlignParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norms::{signal_l1, CutNormOptions};
use crate::regularity::merge_twins;
use crate::rng::{self, derive_seed, Rng};
use crate::signal::{induce, GraphSignal, KernelClass, Partition, StepKernelSignal};

/// Offset mixed into per-trial seeds for the edge coin flips, so that they
/// never share a stream with any trial's point draws.
const EDGE_STREAM: u64 = 1 << 40;

/// A uniform point of `[0, 1]` resolved to its part: `offset` is the relative
/// position inside the part, in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub part: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Weighted,
    Simple,
}

impl SampleMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "weighted" => Some(Self::Weighted),
            "simple" => Some(Self::Simple),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    Two,
    Natural,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            Self::Two => x.log2(),
            Self::Natural => x.ln(),
        }
    }
}

fn draw_points(p: &Partition, k: usize, g: &mut Rng) -> Vec<SamplePoint> {
    let cum: Vec<f64> = p
        .masses()
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m;
            Some(*acc)
        })
        .collect();
    let last = cum.len() - 1;
    (0..k)
        .map(|_| {
            let u: f64 = g.gen();
            let part = cum.partition_point(|&c| c <= u).min(last);
            let start = if part == 0 { 0.0 } else { cum[part - 1] };
            let offset = ((u - start) / p.masses()[part]).clamp(0.0, 1.0 - f64::EPSILON);
            SamplePoint { part, offset }
        })
        .collect()
}

/// `k` i.i.d. uniform points, each resolved to a part by cumulative masses.
pub fn sample_points(p: &Partition, k: usize, seed: u64) -> Vec<SamplePoint> {
    draw_points(p, k, &mut rng::rng(seed))
}

fn features(x: &StepKernelSignal, pts: &[SamplePoint]) -> Matrix {
    Matrix::from_fn(pts.len(), x.d(), |i, c| x.signal().get(pts[i].part, c))
}

/// Weighted graph with `w_ij = W(lambda_i, lambda_j)` (diagonal included) and
/// features `f(lambda_i)`.
pub fn sample_weighted(x: &StepKernelSignal, pts: &[SamplePoint]) -> GraphSignal {
    let k = pts.len();
    GraphSignal {
        directed: x.class().is_directed(),
        weight_range: x.class().weight_range(),
        adjacency: Matrix::from_fn(k, k, |i, j| x.kernel().get(pts[i].part, pts[j].part)),
        features: features(x, pts),
        r: x.radius(),
    }
}

fn simple_with(x: &StepKernelSignal, pts: &[SamplePoint], g: &mut Rng) -> Result<GraphSignal> {
    let class = x.class();
    if !matches!(class, KernelClass::Graphon | KernelClass::DirectedGraphon) {
        return Err(Error::ClassMismatch(format!(
            "simple graphs need edge probabilities in [0, 1]; got a {}",
            class.name()
        )));
    }
    let k = pts.len();
    let mut a = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let p = x.kernel().get(pts[i].part, pts[j].part).clamp(0.0, 1.0);
                if g.gen_bool(p) {
                    a.set(i, j, 1.0);
                }
            }
        }
    }
    if class == KernelClass::Graphon {
        a = Matrix::from_fn(k, k, |i, j| a.get(i, j).max(a.get(j, i)));
    }
    Ok(GraphSignal {
        directed: class.is_directed(),
        weight_range: class.weight_range(),
        adjacency: a,
        features: features(x, pts),
        r: x.radius(),
    })
}

/// Simple graph with independent Bernoulli edges of probability `w_ij`, no
/// self-loops. Undirected graphons draw a directed graph and return
/// `max(A, A^T)`.
pub fn sample_simple(x: &StepKernelSignal, pts: &[SamplePoint], seed: u64) -> Result<GraphSignal> {
    simple_with(x, pts, &mut rng::rng(seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub seed: u64,
    pub k: usize,
    pub mode: SampleMode,
    /// Sampled points per trial.
    pub lambdas: Vec<Vec<SamplePoint>>,
    pub graphs: Vec<GraphSignal>,
}

fn one_trial(x: &StepKernelSignal, k: usize, mode: SampleMode, seed: u64, trial: u64)
    -> Result<(Vec<SamplePoint>, GraphSignal)> {
    let s = derive_seed(seed, trial);
    let pts = sample_points(x.partition(), k, s);
    let g = match mode {
        SampleMode::Weighted => sample_weighted(x, &pts),
        SampleMode::Simple => sample_simple(x, &pts, derive_seed(s, EDGE_STREAM))?,
    };
    Ok((pts, g))
}

/// `trials` independent samples; trial `t` uses seed `seed ^ t`.
pub fn sample_batch(
    x: &StepKernelSignal,
    k: usize,
    trials: usize,
    mode: SampleMode,
    seed: u64,
) -> Result<SampleBatch> {
    check_k(k)?;
    let out = (0..trials as u64)
        .into_par_iter()
        .map(|t| one_trial(x, k, mode, seed, t))
        .collect::<Result<Vec<_>>>()?;
    let (lambdas, graphs) = out.into_iter().unzip();
    Ok(SampleBatch {
        seed,
        k,
        mode,
        lambdas,
        graphs,
    })
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateParams {
    pub log_base: LogBase,
    pub cut: CutNormOptions,
}

impl Default for EstimateParams {
    fn default() -> Self {
        Self {
            log_base: LogBase::Two,
            cut: CutNormOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceEstimate {
    pub k: usize,
    pub mean: f64,
    pub stderr: f64,
    pub distances: Vec<f64>,
    /// `15 / sqrt(log k)`.
    pub bound: f64,
    pub log_base: LogBase,
    /// Whether every per-trial cut norm was computed exactly.
    pub exact: bool,
}

/// Distance between `x` and one sampled graph: nodes are sorted by their
/// position in `[0, 1]`, twin nodes are merged, and the two step objects are
/// compared on their common interval refinement. This is an upper bound on
/// the cut distance.
pub fn sample_distance(
    x: &StepKernelSignal,
    pts: &[SamplePoint],
    g: &GraphSignal,
    cut: &CutNormOptions,
) -> Result<(f64, bool)> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| {
        (pts[a].part, pts[a].offset)
            .partial_cmp(&(pts[b].part, pts[b].offset))
            .expect("offsets are finite")
    });
    let sorted = induce(&g.relabel(&order))?;
    let (merged, _) = merge_twins(&sorted);
    let r = cut_distance(x, &merged.with_class(x.class()), &AlignParams::fixed(*cut))?;
    Ok((r.distance, r.exact))
}

pub fn sampling_bound(k: usize, base: LogBase) -> f64 {
    15.0 / base.log(k as f64).sqrt()
}

/// Monte Carlo estimate of `E[delta(x, sample)]` over `trials` samples.
pub fn estimate_expected_distance(
    x: &StepKernelSignal,
    k: usize,
    trials: usize,
    mode: SampleMode,
    seed: u64,
    params: &EstimateParams,
) -> Result<DistanceEstimate> {
    check_k(k)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let runs = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let (pts, g) = one_trial(x, k, mode, seed, t)?;
            sample_distance(x, &pts, &g, &params.cut)
        })
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let (mean, stderr) = mean_stderr(&distances);
    Ok(DistanceEstimate {
        k,
        mean,
        stderr,
        bound: sampling_bound(k, params.log_base),
        log_base: params.log_base,
        exact: runs.iter().all(|r| r.1),
        distances,
    })
}

/// Sample mean and standard error of the mean (0 for a single value).
pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean over trials of `| ||f(Lambda)||_1 - ||f||_1 |`, where the sampled
/// signal is read on the uniform `k`-part partition.
pub fn signal_l1_deviation(x: &StepKernelSignal, k: usize, trials: usize, seed: u64) -> Result<f64> {
    check_k(k)?;
    let target = signal_l1(x.signal(), x.masses());
    let uniform = vec![1.0 / k as f64; k];
    let devs: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let pts = sample_points(x.partition(), k, derive_seed(seed, t));
            (signal_l1(&features(x, &pts), &uniform) - target).abs()
        })
        .collect();
    Ok(devs.iter().sum::<f64>() / trials.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn graphon(k: Matrix, f: Matrix) -> StepKernelSignal {
        StepKernelSignal::uniform(k, f, KernelClass::Graphon, 1.0).unwrap()
    }

    #[test]
    fn points_single_part_and_reproducible() {
        let p = Partition::uniform(1);
        assert!(sample_points(&p, 50, 3).iter().all(|s| s.part == 0));
        let q = Partition::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(sample_points(&q, 100, 7), sample_points(&q, 100, 7));
        assert_ne!(sample_points(&q, 100, 7), sample_points(&q, 100, 8));
    }

    #[test]
    fn points_frequency() {
        let k = 100_000;
        let pts = sample_points(&Partition::uniform(2), k, 11);
        let hits = pts.iter().filter(|s| s.part == 0).count() as f64 / k as f64;
        let sigma = (0.25 / k as f64).sqrt();
        assert!((hits - 0.5).abs() <= 3.0 * sigma, "{hits}");
    }

    #[test]
    fn weighted_examples() {
        let ones = graphon(Matrix::filled(2, 2, 1.0), Matrix::zeros(2, 1));
        let pts = sample_points(ones.partition(), 6, 1);
        assert!(sample_weighted(&ones, &pts).adjacency.as_slice().iter().all(|&v| v == 1.0));
        let zeros = graphon(Matrix::zeros(2, 2), Matrix::zeros(2, 1));
        assert_eq!(sample_weighted(&zeros, &pts).adjacency.max_abs(), 0.0);

        let x = graphon(m(&[&[0.0, 1.0], &[1.0, 0.0]]), m(&[&[1.0], &[-1.0]]));
        let pts = [SamplePoint { part: 0, offset: 0.3 }, SamplePoint { part: 1, offset: 0.9 }];
        let g = sample_weighted(&x, &pts);
        assert_eq!(g.adjacency, m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert_eq!(g.features, m(&[&[1.0], &[-1.0]]));
        assert!(!g.directed);
    }

    #[test]
    fn simple_examples() {
        let ones = graphon(Matrix::filled(1, 1, 1.0), Matrix::zeros(1, 1));
        let pts = sample_points(ones.partition(), 5, 0);
        let g = sample_simple(&ones, &pts, 4).unwrap();
        let complete = Matrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(g.adjacency, complete);
        let zeros = graphon(Matrix::zeros(1, 1), Matrix::zeros(1, 1));
        assert_eq!(sample_simple(&zeros, &pts, 4).unwrap().adjacency.max_abs(), 0.0);

        let signed = StepKernelSignal::uniform(Matrix::zeros(1, 1), Matrix::zeros(1, 1), KernelClass::SymmetricKernel, 1.0)
            .unwrap();
        assert!(matches!(sample_simple(&signed, &pts, 0), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn symmetrized_edge_rate() {
        let half = graphon(Matrix::filled(1, 1, 0.5), Matrix::zeros(1, 1));
        // 200 nodes give 19900 unordered pairs
        let pts = sample_points(half.partition(), 200, 0);
        let g = sample_simple(&half, &pts, 21).unwrap();
        let mut edges = 0.0;
        for i in 0..200 {
            for j in 0..i {
                edges += g.adjacency.get(i, j);
            }
        }
        let pairs = 19_900.0;
        let rate = edges / pairs;
        let se = (0.75 * 0.25 / pairs).sqrt();
        assert!((rate - 0.75).abs() <= 4.0 * se, "{rate}");
        assert!(g.adjacency.is_symmetric());
    }

    #[test]
    fn constant_graphon_distance_is_zero() {
        let x = graphon(Matrix::filled(3, 3, 0.4), Matrix::filled(3, 1, 0.5));
        let e = estimate_expected_distance(&x, 32, 4, SampleMode::Weighted, 5, &EstimateParams::default()).unwrap();
        assert!(e.distances.iter().all(|&d| d.abs() < 1e-12));
        assert!(e.exact);
        let one = estimate_expected_distance(&x, 32, 1, SampleMode::Weighted, 5, &EstimateParams::default()).unwrap();
        assert_eq!(one.stderr, 0.0);
    }

    #[test]
    fn estimate_is_reproducible_and_bounded() {
        let x = graphon(m(&[&[0.9, 0.1], &[0.1, 0.6]]), m(&[&[1.0], &[-0.5]]));
        let p = EstimateParams::default();
        let a = estimate_expected_distance(&x, 64, 3, SampleMode::Weighted, 9, &p).unwrap();
        let b = estimate_expected_distance(&x, 64, 3, SampleMode::Weighted, 9, &p).unwrap();
        assert_eq!(a, b);
        assert!(a.mean < a.bound);
        assert_eq!(a.bound, 15.0 / 6f64.sqrt());
        let s = estimate_expected_distance(&x, 24, 2, SampleMode::Simple, 9, &p).unwrap();
        assert!(s.mean < s.bound);
    }

    #[test]
    fn batch_matches_single_trials() {
        let x = graphon(m(&[&[0.9, 0.1], &[0.1, 0.6]]), m(&[&[1.0], &[-0.5]]));
        let b = sample_batch(&x, 10, 3, SampleMode::Simple, 42).unwrap();
        assert_eq!(b.graphs.len(), 3);
        assert_eq!(b.lambdas[2], sample_points(x.partition(), 10, 42 ^ 2));
        assert_eq!(b, sample_batch(&x, 10, 3, SampleMode::Simple, 42).unwrap());
    }
}
