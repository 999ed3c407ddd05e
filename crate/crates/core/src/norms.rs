//! Cut norms, L^p norms and the cut metric of step kernel-signals.
//!
//! For a step kernel `D` on parts with masses `mu`, the cut norm is attained on
//! unions of parts, so it is the finite maximum of
//! `|sum_{i in S, j in T} mu_i mu_j D_ij|` over part subsets `S`, `T`.
//! For a fixed `S` the best `T` takes every column with positive (or every
//! column with negative) weighted column sum.

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng;
use crate::signal::StepKernelSignal;

pub const DEFAULT_EXACT_CAP: usize = 22;
pub const DEFAULT_SIGN_CAP: usize = 20;
pub const DEFAULT_RESTARTS: usize = 16;

/// Hard limit of the bitmask enumerations.
const BITMASK_LIMIT: usize = 40;
const HEURISTIC_MAX_ROUNDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact when within the caps, heuristic otherwise.
    Auto,
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutNormOptions {
    pub method: Method,
    /// Largest part count for subset enumeration.
    pub exact_cap: usize,
    /// Largest channel count for sign enumeration of the signal cut norm.
    pub sign_cap: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for CutNormOptions {
    fn default() -> Self {
        Self {
            method: Method::Auto,
            exact_cap: DEFAULT_EXACT_CAP,
            sign_cap: DEFAULT_SIGN_CAP,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

impl CutNormOptions {
    pub fn exact() -> Self {
        Self {
            method: Method::Exact,
            ..Self::default()
        }
    }

    pub fn heuristic(restarts: usize, seed: u64) -> Self {
        Self {
            method: Method::Heuristic,
            restarts,
            seed,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutNormResult {
    pub value: f64,
    #[serde(rename = "witness_S")]
    pub witness_s: Vec<usize>,
    #[serde(rename = "witness_T")]
    pub witness_t: Vec<usize>,
    pub exact: bool,
}

impl CutNormResult {
    fn zero(exact: bool) -> Self {
        Self {
            value: 0.0,
            witness_s: Vec::new(),
            witness_t: Vec::new(),
            exact,
        }
    }

    /// `|sum_{i in S, j in T} mu_i mu_j D_ij|` for the stored witnesses.
    pub fn recompute(&self, d: &Matrix, masses: &[f64]) -> f64 {
        rectangle_mass(d, masses, &self.witness_s, &self.witness_t).abs()
    }
}

/// Signed integral of a step kernel over the rectangle `S x T`.
pub fn rectangle_mass(d: &Matrix, masses: &[f64], s: &[usize], t: &[usize]) -> f64 {
    s.iter()
        .map(|&i| {
            masses[i] * t.iter().map(|&j| masses[j] * d.get(i, j)).sum::<f64>()
        })
        .sum()
}

fn check_square(d: &Matrix, masses: &[f64]) -> Result<()> {
    if d.rows() != masses.len() || d.cols() != masses.len() {
        return Err(Error::Dimension(format!(
            "kernel is {}x{} but there are {} parts",
            d.rows(),
            d.cols(),
            masses.len()
        )));
    }
    Ok(())
}

fn mask_to_vec(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

fn weighted(d: &Matrix, masses: &[f64]) -> Matrix {
    Matrix::from_fn(d.rows(), d.cols(), |i, j| masses[i] * masses[j] * d.get(i, j))
}

/// Best column set for a fixed row set, either sign; returns `(value, T)`.
fn best_columns(w: &Matrix, s: &[usize]) -> (f64, Vec<usize>) {
    let n = w.cols();
    let mut col = vec![0.0; n];
    for &i in s {
        for (c, v) in col.iter_mut().zip(w.row(i)) {
            *c += v;
        }
    }
    let pos: f64 = col.iter().filter(|&&c| c > 0.0).sum();
    let neg: f64 = -col.iter().filter(|&&c| c < 0.0).sum::<f64>();
    if pos >= neg {
        (pos, (0..n).filter(|&j| col[j] > 0.0).collect())
    } else {
        (neg, (0..n).filter(|&j| col[j] < 0.0).collect())
    }
}

/// Exact kernel cut norm by Gray-code enumeration of the row set.
pub fn cut_norm_kernel_exact(d: &Matrix, masses: &[f64], cap: usize) -> Result<CutNormResult> {
    check_square(d, masses)?;
    let n = masses.len();
    let cap = cap.min(BITMASK_LIMIT);
    if n > cap {
        return Err(Error::CapExceeded {
            what: "exact kernel cut norm",
            needed: n,
            cap,
        });
    }
    let w = weighted(d, masses);
    let mut col = vec![0.0; n];
    let mut best_value = 0.0;
    let mut best_mask = 0u64;
    let mut mask = 0u64;
    for g in 1u64..(1u64 << n) {
        let bit = g.trailing_zeros() as usize;
        mask ^= 1 << bit;
        let row = w.row(bit);
        if mask >> bit & 1 == 1 {
            for (c, v) in col.iter_mut().zip(row) {
                *c += v;
            }
        } else {
            for (c, v) in col.iter_mut().zip(row) {
                *c -= v;
            }
        }
        let (mut pos, mut neg) = (0.0, 0.0);
        for &c in &col {
            if c > 0.0 {
                pos += c;
            } else {
                neg -= c;
            }
        }
        let v = pos.max(neg);
        if v > best_value {
            best_value = v;
            best_mask = mask;
        }
    }
    if best_mask == 0 {
        return Ok(CutNormResult::zero(true));
    }
    let s = mask_to_vec(best_mask, n);
    let (_, t) = best_columns(&w, &s);
    let mut out = CutNormResult {
        value: 0.0,
        witness_s: s,
        witness_t: t,
        exact: true,
    };
    out.value = out.recompute(d, masses);
    Ok(out)
}

/// One alternating-maximization run of `sign * sum_{S x T} w` from `start`.
fn alternate(w: &Matrix, start: Vec<usize>, sign: f64) -> (f64, Vec<usize>, Vec<usize>) {
    let n = w.rows();
    let mut s = start;
    let mut t: Vec<usize> = Vec::new();
    let mut value = f64::NEG_INFINITY;
    for _ in 0..HEURISTIC_MAX_ROUNDS {
        let mut col = vec![0.0; n];
        for &i in &s {
            for (c, v) in col.iter_mut().zip(w.row(i)) {
                *c += sign * v;
            }
        }
        let new_t: Vec<usize> = (0..n).filter(|&j| col[j] > 0.0).collect();
        let row: Vec<f64> = (0..n)
            .map(|i| sign * new_t.iter().map(|&j| w.get(i, j)).sum::<f64>())
            .collect();
        let new_s: Vec<usize> = (0..n).filter(|&i| row[i] > 0.0).collect();
        let new_value: f64 = new_s.iter().map(|&i| row[i]).sum();
        if new_value <= value {
            break;
        }
        value = new_value;
        s = new_s;
        t = new_t;
    }
    (value.max(0.0), s, t)
}

fn better(a: &CutNormResult, b: &CutNormResult) -> bool {
    // larger value wins; ties go to the lexicographically smallest witness pair
    a.value > b.value
        || (a.value == b.value && (&a.witness_s, &a.witness_t) < (&b.witness_s, &b.witness_t))
}

/// Lower bound on the kernel cut norm by seeded multistart alternating
/// maximization. Restart `r < n` starts from the singleton `{r}`; later
/// restarts start from a random nonempty row set.
pub fn cut_norm_kernel_heuristic(
    d: &Matrix,
    masses: &[f64],
    restarts: usize,
    seed: u64,
) -> CutNormResult {
    assert_eq!(d.rows(), masses.len(), "kernel/partition size mismatch");
    let n = masses.len();
    if n == 0 {
        return CutNormResult::zero(false);
    }
    let w = weighted(d, masses);
    let runs: Vec<CutNormResult> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let start = if r < n {
                vec![r]
            } else {
                let mut g = rng::stream(seed, r as u64);
                let mut s: Vec<usize> = (0..n).filter(|_| g.gen_bool(0.5)).collect();
                if s.is_empty() {
                    s.push(g.gen_range(0..n));
                }
                s
            };
            let mut best = CutNormResult::zero(false);
            for sign in [1.0, -1.0] {
                let (_, s, t) = alternate(&w, start.clone(), sign);
                let mut cand = CutNormResult {
                    value: 0.0,
                    witness_s: s,
                    witness_t: t,
                    exact: false,
                };
                cand.value = cand.recompute(d, masses);
                if cand.witness_s.is_empty() || cand.witness_t.is_empty() {
                    cand = CutNormResult::zero(false);
                }
                if better(&cand, &best) {
                    best = cand;
                }
            }
            best
        })
        .collect();
    runs.into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .unwrap_or_else(|| CutNormResult::zero(false))
}

/// Kernel cut norm dispatched on [`CutNormOptions::method`].
pub fn cut_norm_kernel(d: &Matrix, masses: &[f64], opts: &CutNormOptions) -> Result<CutNormResult> {
    check_square(d, masses)?;
    let n = masses.len();
    match opts.method {
        Method::Exact => cut_norm_kernel_exact(d, masses, opts.exact_cap),
        Method::Heuristic => Ok(cut_norm_kernel_heuristic(d, masses, opts.restarts, opts.seed)),
        Method::Auto if n <= opts.exact_cap.min(BITMASK_LIMIT) => {
            cut_norm_kernel_exact(d, masses, opts.exact_cap)
        }
        Method::Auto => Ok(cut_norm_kernel_heuristic(d, masses, opts.restarts, opts.seed)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalCutNorm {
    pub value: f64,
    #[serde(rename = "witness_S")]
    pub witness_s: Vec<usize>,
    pub exact: bool,
}

impl SignalCutNorm {
    /// `(1/d) * || sum_{j in S} mu_j f_j ||_1` for the stored witness.
    pub fn recompute(&self, f: &Matrix, masses: &[f64]) -> f64 {
        subset_l1(f, masses, &self.witness_s) / f.cols() as f64
    }
}

fn subset_l1(f: &Matrix, masses: &[f64], s: &[usize]) -> f64 {
    let mut v = vec![0.0; f.cols()];
    for &j in s {
        for (acc, x) in v.iter_mut().zip(f.row(j)) {
            *acc += masses[j] * x;
        }
    }
    v.iter().map(|x| x.abs()).sum()
}

fn signal_from_support(f: &Matrix, masses: &[f64], s: Vec<usize>, exact: bool) -> SignalCutNorm {
    let mut out = SignalCutNorm {
        value: 0.0,
        witness_s: s,
        exact,
    };
    out.value = out.recompute(f, masses);
    out
}

fn signal_by_signs(f: &Matrix, masses: &[f64]) -> SignalCutNorm {
    let (n, d) = (f.rows(), f.cols());
    let mut eps = vec![1.0; d];
    let mut proj: Vec<f64> = (0..n)
        .map(|j| masses[j] * f.row(j).iter().sum::<f64>())
        .collect();
    let score = |p: &[f64]| p.iter().filter(|&&x| x > 0.0).sum::<f64>();
    let support = |p: &[f64]| (0..n).filter(|&j| p[j] > 0.0).collect::<Vec<_>>();
    let mut best = (score(&proj), support(&proj));
    for g in 1u64..(1u64 << d) {
        let c = g.trailing_zeros() as usize;
        for (j, p) in proj.iter_mut().enumerate() {
            *p -= 2.0 * eps[c] * masses[j] * f.get(j, c);
        }
        eps[c] = -eps[c];
        let v = score(&proj);
        if v > best.0 {
            best = (v, support(&proj));
        } else if v == best.0 {
            let s = support(&proj);
            if s < best.1 {
                best.1 = s;
            }
        }
    }
    signal_from_support(f, masses, best.1, true)
}

fn signal_by_subsets(f: &Matrix, masses: &[f64]) -> SignalCutNorm {
    let (n, d) = (f.rows(), f.cols());
    let mut acc = vec![0.0; d];
    let mut mask = 0u64;
    let mut best = (0.0, 0u64);
    for g in 1u64..(1u64 << n) {
        let j = g.trailing_zeros() as usize;
        mask ^= 1 << j;
        let sign = if mask >> j & 1 == 1 { 1.0 } else { -1.0 };
        for (a, x) in acc.iter_mut().zip(f.row(j)) {
            *a += sign * masses[j] * x;
        }
        let v: f64 = acc.iter().map(|x| x.abs()).sum();
        if v > best.0 || (v == best.0 && mask_to_vec(mask, n) < mask_to_vec(best.1, n)) {
            best = (v, mask);
        }
    }
    signal_from_support(f, masses, mask_to_vec(best.1, n), true)
}

fn signal_heuristic(f: &Matrix, masses: &[f64], restarts: usize, seed: u64) -> SignalCutNorm {
    let (n, d) = (f.rows(), f.cols());
    let runs: Vec<SignalCutNorm> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut g = rng::stream(seed, r as u64);
            let mut eps: Vec<f64> = (0..d)
                .map(|c| if r == 0 || (c + r) % 2 == 0 && g.gen_bool(0.5) { 1.0 } else { -1.0 })
                .collect();
            let mut best = signal_from_support(f, masses, Vec::new(), false);
            for _ in 0..HEURISTIC_MAX_ROUNDS {
                let s: Vec<usize> = (0..n)
                    .filter(|&j| f.row(j).iter().zip(&eps).map(|(x, e)| x * e).sum::<f64>() > 0.0)
                    .collect();
                let cand = signal_from_support(f, masses, s, false);
                if cand.value <= best.value {
                    break;
                }
                let mut v = vec![0.0; d];
                for &j in &cand.witness_s {
                    for (a, x) in v.iter_mut().zip(f.row(j)) {
                        *a += masses[j] * x;
                    }
                }
                eps = v.iter().map(|x| if *x >= 0.0 { 1.0 } else { -1.0 }).collect();
                best = cand;
            }
            best
        })
        .collect();
    runs.into_iter()
        .reduce(|a, b| {
            if b.value > a.value || (b.value == a.value && b.witness_s < a.witness_s) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart")
}

/// Signal cut norm `(1/d) sup_S || int_S f ||_1`.
///
/// Exact by sign enumeration when `d <= sign_cap`, else by subset enumeration
/// when `n <= exact_cap`; otherwise heuristic unless `method` is `Exact`.
pub fn signal_cut_norm(f: &Matrix, masses: &[f64], opts: &CutNormOptions) -> Result<SignalCutNorm> {
    if f.rows() != masses.len() {
        return Err(Error::Dimension(format!(
            "signal has {} rows but there are {} parts",
            f.rows(),
            masses.len()
        )));
    }
    if f.cols() == 0 {
        return Err(Error::Dimension("signal has no channels".into()));
    }
    let (n, d) = (f.rows(), f.cols());
    let sign_ok = d <= opts.sign_cap.min(BITMASK_LIMIT);
    let subset_ok = n <= opts.exact_cap.min(BITMASK_LIMIT);
    match opts.method {
        Method::Heuristic => Ok(signal_heuristic(f, masses, opts.restarts, opts.seed)),
        _ if sign_ok => Ok(signal_by_signs(f, masses)),
        _ if subset_ok => Ok(signal_by_subsets(f, masses)),
        Method::Auto => Ok(signal_heuristic(f, masses, opts.restarts, opts.seed)),
        Method::Exact => Err(Error::CapExceeded {
            what: "exact signal cut norm",
            needed: d.min(n),
            cap: opts.sign_cap.max(opts.exact_cap),
        }),
    }
}

/// Cut norm of one scalar channel: `max(||g+||_1, ||g-||_1)`.
pub fn channel_cut_norm(f: &Matrix, masses: &[f64], c: usize) -> f64 {
    let (mut pos, mut neg) = (0.0, 0.0);
    for (j, &m) in masses.iter().enumerate() {
        let v = f.get(j, c);
        if v > 0.0 {
            pos += m * v;
        } else {
            neg -= m * v;
        }
    }
    f64::max(pos, neg)
}

/// Product cut norm: the channel cut norms averaged over channels.
pub fn product_cut_norm(f: &Matrix, masses: &[f64]) -> f64 {
    let d = f.cols();
    (0..d).map(|c| channel_cut_norm(f, masses, c)).sum::<f64>() / d as f64
}

/// Signal L1 norm `sum_j mu_j ||f_j||_1`.
pub fn signal_l1(f: &Matrix, masses: &[f64]) -> f64 {
    f.iter_rows()
        .zip(masses)
        .map(|(r, m)| m * r.iter().map(|x| x.abs()).sum::<f64>())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorms {
    pub kernel_l1: f64,
    pub kernel_l2: f64,
    pub kernel_linf: f64,
    pub signal_l1: f64,
    pub signal_linf: f64,
}

impl LpNorms {
    /// `||W||_1 + ||f||_1`.
    pub fn combined_l1(&self) -> f64 {
        self.kernel_l1 + self.signal_l1
    }
}

pub fn kernel_lp(d: &Matrix, masses: &[f64]) -> (f64, f64, f64) {
    let (mut l1, mut l2) = (0.0, 0.0);
    for (i, mi) in masses.iter().enumerate() {
        for (j, mj) in masses.iter().enumerate() {
            let v = d.get(i, j);
            l1 += mi * mj * v.abs();
            l2 += mi * mj * v * v;
        }
    }
    (l1, l2.sqrt(), d.max_abs())
}

pub fn lp_norms(x: &StepKernelSignal) -> LpNorms {
    let (kernel_l1, kernel_l2, kernel_linf) = kernel_lp(x.kernel(), x.masses());
    LpNorms {
        kernel_l1,
        kernel_l2,
        kernel_linf,
        signal_l1: signal_l1(x.signal(), x.masses()),
        signal_linf: x.signal().max_abs(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutMetric {
    pub value: f64,
    pub kernel: CutNormResult,
    pub signal: SignalCutNorm,
    pub exact: bool,
}

fn same_partition(a: &StepKernelSignal, b: &StepKernelSignal) -> Result<()> {
    if a.n() != b.n()
        || a.masses()
            .iter()
            .zip(b.masses())
            .any(|(x, y)| (x - y).abs() > 1e-12)
    {
        return Err(Error::PartitionMismatch(format!(
            "{} parts vs {} parts with different masses; refine to a common partition first",
            a.n(),
            b.n()
        )));
    }
    if a.d() != b.d() {
        return Err(Error::Dimension(format!(
            "signal channels {} vs {}",
            a.d(),
            b.d()
        )));
    }
    Ok(())
}

/// Cut metric `||W - V||_box + ||f - g||_box` on a shared partition.
pub fn cut_metric(a: &StepKernelSignal, b: &StepKernelSignal, opts: &CutNormOptions) -> Result<CutMetric> {
    same_partition(a, b)?;
    let masses = a.masses();
    let dk = a.kernel().sub(b.kernel())?;
    let ds = a.signal().sub(b.signal())?;
    let kernel = cut_norm_kernel(&dk, masses, opts)?;
    let signal = signal_cut_norm(&ds, masses, opts)?;
    Ok(CutMetric {
        value: kernel.value + signal.value,
        exact: kernel.exact && signal.exact,
        kernel,
        signal,
    })
}

/// Graphon-signal cut norm `||W||_box + ||f||_box`.
pub fn cut_norm_pair(x: &StepKernelSignal, opts: &CutNormOptions) -> Result<f64> {
    let k = cut_norm_kernel(x.kernel(), x.masses(), opts)?;
    let s = signal_cut_norm(x.signal(), x.masses(), opts)?;
    Ok(k.value + s.value)
}
