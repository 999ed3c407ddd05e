//! Verification suites. Each writes `results.csv` (one row per checked
//! quantity), `summary.json` and plot-ready CSVs under `plotdata/`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use graphon_signal::alignment::{cut_distance, AlignParams};
use graphon_signal::bounds::{
    certified_radius, covering_number_log2, hidden_feature_bound, ln_xi, mpnn_lipschitz_constants,
    multinomial_check, recurrence, sampling_bounds, xi_inverse, CoveringPreset, HiddenCoeff,
    NetworkConstants,
};
use graphon_signal::mpnn::{apply_step, check_commutativity, lipschitz_metadata, MpnnSpec};
use graphon_signal::norms::{
    cut_metric, cut_norm_kernel, cut_norm_kernel_exact, cut_norm_kernel_heuristic, kernel_lp,
    product_cut_norm, signal_cut_norm, signal_l1, CutNormOptions, DEFAULT_EXACT_CAP,
};
use graphon_signal::random::{self, MpnnShape, ALL_CLASSES};
use graphon_signal::regularity::{equitize_step, weak_regularity_decompose};
use graphon_signal::rng::{self, derive_seed};
use graphon_signal::sampling::{
    estimate_expected_distance, sample_points, sample_simple, EstimateParams, LogBase, SampleMode,
};
use graphon_signal::{KernelClass, Matrix, StepKernelSignal, Tolerances};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::generate::network;

pub const SUITES: [&str; 9] = [
    "norm-chain",
    "cutnorm-oracle",
    "commutativity",
    "lipschitz",
    "hidden-bound",
    "regularity",
    "sampling-decay",
    "bounds",
    "multinomial",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub suite: String,
    pub case: String,
    pub metric: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotData {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub suite: String,
    pub rows: Vec<Row>,
    pub plots: Vec<PlotData>,
    pub elapsed_seconds: f64,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    /// Pass/fail per metric.
    pub fn invariants(&self) -> BTreeMap<String, bool> {
        let mut out = BTreeMap::new();
        for r in &self.rows {
            *out.entry(r.metric.clone()).or_insert(true) &= r.pass;
        }
        out
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Writes `results.csv`, `summary.json` and `plotdata/*.csv` into `dir`.
    pub fn write(&self, dir: &Path, cfg: &ExperimentConfig) -> Result<()> {
        fs::create_dir_all(dir.join("plotdata")).with_context(|| format!("creating {}", dir.display()))?;
        let mut w = csv::Writer::from_path(dir.join("results.csv"))?;
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        for p in &self.plots {
            let mut w = csv::Writer::from_path(dir.join("plotdata").join(format!("{}.csv", p.name)))?;
            w.write_record(&p.header)?;
            for row in &p.rows {
                w.write_record(row.iter().map(|v| v.to_string()))?;
            }
            w.flush()?;
        }
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        let summary = serde_json::json!({
            "suite": self.suite,
            "pass": self.pass(),
            "invariants": self.invariants(),
            "rows": self.rows.len(),
            "failures": self.failures().count(),
            "elapsed_seconds": self.elapsed_seconds,
            "timestamp": timestamp,
            "config": cfg,
        });
        fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
        Ok(())
    }
}

struct Ctx<'a> {
    suite: &'a str,
    cfg: &'a ExperimentConfig,
    tol: Tolerances,
}

impl Ctx<'_> {
    fn row(&self, case: impl Into<String>, metric: &str, value: f64, bound: f64, pass: bool) -> Row {
        Row {
            suite: self.suite.to_string(),
            case: case.into(),
            metric: metric.to_string(),
            value,
            bound,
            pass,
        }
    }

    /// `value <= bound`.
    fn le(&self, case: impl Into<String>, metric: &str, value: f64, bound: f64) -> Row {
        self.row(case, metric, value, bound, value <= bound)
    }

    fn seed(&self, i: usize) -> u64 {
        derive_seed(self.cfg.seed, i as u64)
    }

    fn classes(&self) -> Result<Vec<KernelClass>> {
        match &self.cfg.class {
            None => Ok(ALL_CLASSES.to_vec()),
            Some(name) => KernelClass::parse(name)
                .map(|c| vec![c])
                .with_context(|| format!("unknown kernel class {name:?}")),
        }
    }
}

/// Runs a suite by name.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<Outcome> {
    let suite = SUITES
        .iter()
        .find(|s| **s == cfg.suite)
        .with_context(|| format!("unknown suite {:?}; expected one of {}", cfg.suite, SUITES.join(", ")))?;
    let ctx = Ctx {
        suite,
        cfg,
        tol: cfg.tolerances()?,
    };
    let start = Instant::now();
    let (rows, plots) = match *suite {
        "norm-chain" => (norm_chain(&ctx)?, Vec::new()),
        "cutnorm-oracle" => (cutnorm_oracle(&ctx)?, Vec::new()),
        "commutativity" => (commutativity(&ctx)?, Vec::new()),
        "lipschitz" => lipschitz(&ctx)?,
        "hidden-bound" => (hidden_bound(&ctx)?, Vec::new()),
        "regularity" => (regularity(&ctx)?, Vec::new()),
        "sampling-decay" => sampling_decay(&ctx)?,
        "bounds" => (bounds(&ctx)?, Vec::new()),
        "multinomial" => multinomial(&ctx)?,
        _ => unreachable!(),
    };
    Ok(Outcome {
        suite: suite.to_string(),
        rows,
        plots,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

fn par_cases<F>(cases: usize, f: F) -> Result<Vec<Row>>
where
    F: Fn(usize) -> Result<Vec<Row>> + Sync + Send,
{
    let per_case = (0..cases).into_par_iter().map(f).collect::<Result<Vec<_>>>()?;
    Ok(per_case.into_iter().flatten().collect())
}

fn norm_chain(ctx: &Ctx) -> Result<Vec<Row>> {
    let classes = ctx.classes()?;
    let ds = ctx.cfg.d_or(&[1, 2, 3, 5]);
    let n_max = ctx.cfg.n_or(16);
    let slack = ctx.tol.chain_slack;
    let exact = CutNormOptions::exact();
    par_cases(ctx.cfg.cases_or(1000), |i| {
        let seed = ctx.seed(i);
        let mut g = rng::stream(seed, 7);
        let n = g.gen_range(1..=n_max);
        let class = classes[g.gen_range(0..classes.len())];
        let x = random::step(n, ds[i % ds.len()], class, ctx.cfg.r, g.gen_bool(0.5), seed);
        let mu = x.masses();
        let (l1, l2, linf) = kernel_lp(x.kernel(), mu);
        let cut = cut_norm_kernel(x.kernel(), mu, &exact)?.value;
        let kernel_gap = [-cut, cut - l1, l1 - l2, l2 - linf, linf - 1.0]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let f = x.signal();
        let d = f.cols() as f64;
        let sbox = signal_cut_norm(f, mu, &exact)?.value;
        let prod = product_cut_norm(f, mu);
        let fl1 = signal_l1(f, mu);
        let signal_gap = [fl1 / (2.0 * d) - prod, prod / d - sbox, sbox - prod, prod - fl1]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let case = format!("{i}:n={n},d={},{}", f.cols(), class.name());
        Ok(vec![
            ctx.le(case.clone(), "kernel_chain_gap", kernel_gap, slack),
            ctx.le(case, "signal_chain_gap", signal_gap, slack),
        ])
    })
}

fn cutnorm_oracle(ctx: &Ctx) -> Result<Vec<Row>> {
    let n = ctx.cfg.n_or(6);
    let restarts = ctx.cfg.restarts_or(16);
    let tol = ctx.tol.recompute;
    let classes = ctx.classes()?;
    let cases = ctx.cfg.cases_or(200);
    let mut rows = par_cases(cases, |i| {
        let seed = ctx.seed(i);
        let class = if ctx.cfg.class.is_some() { classes[0] } else { KernelClass::GeneralKernel };
        let x = random::step(n, 1, class, ctx.cfg.r, false, seed);
        let mu = x.masses();
        let ex = cut_norm_kernel_exact(x.kernel(), mu, DEFAULT_EXACT_CAP)?;
        let h = cut_norm_kernel_heuristic(x.kernel(), mu, restarts, seed);
        let witness = (ex.recompute(x.kernel(), mu) - ex.value)
            .abs()
            .max((h.recompute(x.kernel(), mu) - h.value).abs());
        let gap = ex.value - h.value;
        let case = i.to_string();
        Ok(vec![
            ctx.le(case.clone(), "heuristic_excess", -gap, tol),
            ctx.le(case.clone(), "witness_error", witness, tol),
            ctx.row(case, "heuristic_gap", gap, tol, true),
        ])
    })?;
    let matched = rows
        .iter()
        .filter(|r| r.metric == "heuristic_gap" && r.value.abs() <= tol)
        .count();
    let rate = matched as f64 / cases as f64;
    rows.push(ctx.row("all", "agreement_rate", rate, 0.95, rate >= 0.95));
    Ok(rows)
}

fn commutativity(ctx: &Ctx) -> Result<Vec<Row>> {
    let classes = ctx.classes()?;
    let ds = ctx.cfg.d_or(&[1, 3]);
    let n_max = ctx.cfg.n_or(8);
    par_cases(ctx.cfg.cases_or(100), |i| {
        let seed = ctx.seed(i);
        let class = classes[i % classes.len()];
        let d = ds[(i / classes.len()) % ds.len()];
        let depth = 1 + i % 3;
        let readout = i % 4 != 3;
        let n = 2 + (seed as usize % (n_max - 1).max(1));
        let g = random::graph(n, d, class, ctx.cfg.r, seed);
        let m = network(seed, d, depth, readout);
        let rep = check_commutativity(&m, &g, ctx.tol.commute)?;
        let case = format!("{i}:{},n={n},d={d},T={depth},readout={readout}", class.name());
        Ok(vec![ctx.le(case, "max_deviation", rep.max_deviation, ctx.tol.commute)])
    })
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))
}

/// `(||Theta(a) - Theta(b)||_inf, L_H)` for a network with readout.
fn readout_gap(m: &MpnnSpec, a: &StepKernelSignal, b: &StepKernelSignal) -> Result<(f64, f64)> {
    let meta = lipschitz_metadata(m);
    let c = mpnn_lipschitz_constants(
        &NetworkConstants::certified(&meta),
        certified_radius(a.radius().max(b.radius())),
        HiddenCoeff::Six,
    );
    let ya = apply_step(m, a)?.readout.context("network has no readout")?;
    let yb = apply_step(m, b)?.readout.context("network has no readout")?;
    Ok((max_diff(&ya, &yb), c.l_h.value.unwrap_or(f64::INFINITY)))
}

fn lipschitz(ctx: &Ctx) -> Result<(Vec<Row>, Vec<PlotData>)> {
    let classes = ctx.classes()?;
    let slack = ctx.tol.chain_slack;
    let n_max = ctx.cfg.n_or(6);
    let cases = ctx.cfg.cases_or(100);
    let results = (0..cases)
        .into_par_iter()
        .map(|i| {
            let seed = ctx.seed(i);
            let d = 1 + i % 3;
            let n = 1 + i % n_max;
            let class = classes[i % classes.len()];
            let (a, b) = random::step_pair(n, d, class, ctx.cfg.r, i % 2 == 0, seed);
            let m = network(seed, d, 1 + i % 3, true);
            let dist = cut_metric(&a, &b, &CutNormOptions::exact())?.value;
            let (gap, l_h) = readout_gap(&m, &a, &b)?;
            Ok((i, dist, gap, l_h))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<Row> = results
        .iter()
        .map(|&(i, dist, gap, l_h)| ctx.le(format!("{i}:same_partition"), "readout_gap", gap, l_h * dist + slack))
        .collect();
    let plot = PlotData {
        name: "lipschitz".into(),
        header: vec!["case".into(), "cut_metric".into(), "readout_gap".into(), "l_h".into()],
        rows: results.iter().map(|&(i, d, g, l)| vec![i as f64, d, g, l]).collect(),
    };
    // part counts whose common refinement stays within the exact alignment cap
    let sizes = [(1, 2), (2, 4), (3, 3), (4, 4), (1, 3), (4, 2), (2, 1), (3, 1), (2, 2), (1, 4)];
    rows.extend(par_cases(20, |i| {
        let seed = derive_seed(ctx.seed(i), 1 << 20);
        let (na, nb) = sizes[i % sizes.len()];
        let class = classes[i % classes.len()];
        let d = 1 + i % 2;
        let a = random::step(na, d, class, ctx.cfg.r, true, seed);
        let b = random::step(nb, d, class, ctx.cfg.r, true, seed ^ 1);
        let m = network(seed, d, 2, true);
        let al = cut_distance(&a, &b, &AlignParams::exact())?;
        let (gap, l_h) = readout_gap(&m, &a, &b)?;
        Ok(vec![
            ctx.le(format!("{i}:aligned,n={na}/{nb}"), "readout_gap_aligned", gap, l_h * al.distance + slack),
            ctx.row(format!("{i}:aligned,n={na}/{nb}"), "alignment_exact", al.exact as u8 as f64, 1.0, al.exact),
        ])
    })?);
    Ok((rows, vec![plot]))
}

fn hidden_bound(ctx: &Ctx) -> Result<Vec<Row>> {
    let classes = ctx.classes()?;
    let cases = ctx.cfg.cases_or(100);
    let mut rows = par_cases(cases, |i| {
        let seed = ctx.seed(i);
        let d = 1 + i % 3;
        let dims = [d, 2, 2, 1][..2 + i % 3].to_vec();
        let mut shape = MpnnShape::new(dims, 2, 2);
        shape.scale = 1.5;
        shape.bias = 2.0;
        let m = random::mpnn(&shape, seed);
        let meta = lipschitz_metadata(&m);
        let r = ctx.cfg.r.max(1.0) + (i % 4) as f64;
        if !(meta.k > 1 && meta.l > 1.0 && meta.b > 1.0) {
            return Ok(Vec::new());
        }
        let x = random::step(4, d, classes[i % classes.len()], r, false, seed);
        let fwd = apply_step(&m, &x)?;
        Ok(fwd
            .hidden
            .iter()
            .enumerate()
            .map(|(t, h)| {
                let b = hidden_feature_bound(meta.k as f64, meta.l, meta.b, r, t, HiddenCoeff::Six);
                ctx.le(format!("{i}:t={t}"), "log2_hidden", h.max_abs().log2(), b.bound.log2)
            })
            .collect())
    })?;
    let runs = rows.iter().filter(|r| r.case.ends_with(":t=0")).count();
    rows.push(ctx.row("all", "runs_meeting_hypotheses", runs as f64, 1.0, runs >= 1));
    Ok(rows)
}

fn regularity(ctx: &Ctx) -> Result<Vec<Row>> {
    let n = ctx.cfg.n_or(8);
    let steps = ctx.cfg.steps_or(&[4, 9, 16]);
    let exact = CutNormOptions::exact();
    let mut rows = par_cases(ctx.cfg.cases_or(30), |i| {
        let seed = ctx.seed(i);
        let x = random::step(n, 1, KernelClass::Graphon, ctx.cfg.r, i % 2 == 0, seed);
        steps
            .iter()
            .map(|&m| {
                let dec = weak_regularity_decompose(&x, m, &exact)?;
                Ok(ctx.le(format!("{i}:m={m}"), "residual_cutnorm", dec.residual_cutnorm_estimate, 1.0 / (m as f64).sqrt()))
            })
            .collect()
    })?;
    let classes = ctx.classes()?;
    let slack = ctx.tol.chain_slack;
    rows.extend(par_cases(100, |i| {
        let seed = derive_seed(ctx.seed(i), 1 << 21);
        let k = 1 + i % 6;
        let x = random::step(k, 1 + i % 3, classes[i % classes.len()], ctx.cfg.r, false, seed);
        let parts = k + 1 + (i * 7) % 40;
        let (_, _, p) = equitize_step(&x, parts)?;
        let case = format!("{i}:k={k},n={parts}");
        Ok(vec![
            ctx.le(case.clone(), "equitize_kernel_l1", p.kernel_l1, p.kernel_bound + slack),
            ctx.le(case, "equitize_signal_l1", p.signal_l1, p.signal_bound + slack),
        ])
    })?);
    Ok(rows)
}

/// The fixed two-block graphon with a one-channel signal.
pub fn two_block() -> StepKernelSignal {
    StepKernelSignal::uniform(
        Matrix::from_rows(vec![vec![0.8, 0.2], vec![0.2, 0.6]]).expect("rows"),
        Matrix::from_rows(vec![vec![1.0], vec![-1.0]]).expect("rows"),
        KernelClass::Graphon,
        1.0,
    )
    .expect("valid")
}

fn edge_rate(class: KernelClass, graphs: u64, upper_only: bool, seed: u64) -> Result<(f64, f64)> {
    let x = StepKernelSignal::uniform(Matrix::filled(1, 1, 0.5), Matrix::filled(1, 1, 0.0), class, 1.0)?;
    let k = 101;
    let (mut ones, mut total) = (0usize, 0usize);
    for s in 0..graphs {
        let s = derive_seed(seed, s);
        let g = sample_simple(&x, &sample_points(x.partition(), k, s), derive_seed(s, 1 << 40))?;
        for i in 0..k {
            for j in 0..k {
                if i != j && (!upper_only || i < j) {
                    total += 1;
                    ones += (g.adjacency.get(i, j) == 1.0) as usize;
                }
            }
        }
    }
    let rate = ones as f64 / total as f64;
    Ok((rate, (rate * (1.0 - rate) / total as f64).sqrt()))
}

fn sampling_decay(ctx: &Ctx) -> Result<(Vec<Row>, Vec<PlotData>)> {
    let x = two_block();
    let params = EstimateParams {
        log_base: LogBase::Two,
        cut: CutNormOptions::default(),
    };
    let trials = ctx.cfg.trials_or(20);
    let grid = ctx.cfg.k_grid_or(&[64, 128, 256, 512]);
    let mut rows = Vec::new();
    let mut ests = Vec::new();
    for &k in &grid {
        let e = estimate_expected_distance(&x, k, trials, SampleMode::Weighted, ctx.cfg.seed, &params)?;
        rows.push(ctx.le(format!("k={k}"), "mean_distance", e.mean, e.bound));
        ests.push(e);
    }
    for w in ests.windows(2) {
        rows.push(ctx.le(
            format!("k={}->{}", w[0].k, w[1].k),
            "mean_increase",
            w[1].mean - w[0].mean,
            w[0].stderr.max(w[1].stderr),
        ));
    }
    let (rate, se) = edge_rate(KernelClass::DirectedGraphon, 1, false, ctx.cfg.seed)?;
    rows.push(ctx.le("W=1/2,directed", "edge_rate_deviation", (rate - 0.5).abs(), 4.0 * se));
    let (rate, se) = edge_rate(KernelClass::Graphon, 2, true, ctx.cfg.seed)?;
    rows.push(ctx.le("W=1/2,max(A,A^T)", "edge_rate_deviation", (rate - 0.75).abs(), 4.0 * se));
    let plot = PlotData {
        name: "sampling_decay".into(),
        header: vec!["k".into(), "mean".into(), "stderr".into(), "bound".into()],
        rows: ests.iter().map(|e| vec![e.k as f64, e.mean, e.stderr, e.bound]).collect(),
    };
    Ok((rows, vec![plot]))
}

fn bounds(ctx: &Ctx) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    let mut eq = |case: &str, metric: &str, value: f64, expect: f64, tol: f64| {
        let err = if expect == 0.0 { value.abs() } else { ((value - expect) / expect).abs() };
        rows.push(ctx.row(case, metric, value, expect, err <= tol));
    };
    for n in [10.0, 1e3, 1e6] {
        let x = xi_inverse(n, 2.0, CoveringPreset::Sharp, 1.0)?;
        let back = ln_xi(x.r, 2.0, CoveringPreset::Sharp).exp();
        eq(&format!("N={n}"), "xi_round_trip", back, n, 1e-6);
    }
    let cov = covering_number_log2(1.0, 2.0, CoveringPreset::Sharp)?;
    eq("c=2,eps=1", "covering_log2", cov.log2_kappa, 256.0, 0.0);
    let cov = covering_number_log2(2.0, 2.0, CoveringPreset::Sharp)?;
    eq("c=2,eps=2", "covering_log2", cov.log2_kappa, 4.0, 0.0);
    let s = sampling_bounds(1024.0, 1.0, None, LogBase::Two)?;
    eq("k=1024", "cut_distance_constant", s.cut_distance, 15.0 / 10f64.sqrt(), 1e-15);
    let s = sampling_bounds(16.0, 1.0, None, LogBase::Two)?;
    eq("k=16", "simple_graph_constant", s.simple_graph, 2.75, 1e-15);
    let s = sampling_bounds(100.0, 1.0, None, LogBase::Two)?;
    eq("k=100,r=1", "signal_constant", s.signal, 0.1, 1e-15);
    let h = hidden_feature_bound(2.0, 2.0, 2.0, 2.0, 1, HiddenCoeff::Six);
    eq("K=L=B=r=2,t=1", "hidden_bound", h.bound.value.unwrap_or(f64::INFINITY), 589_824.0, 1e-12);
    let h = hidden_feature_bound(2.0, 2.0, 2.0, 2.0, 10, HiddenCoeff::Six);
    eq("K=L=B=r=2,t=10", "hidden_bound_log2", h.bound.log2, 1024.0 * 768f64.log2(), 1e-12);
    let c = mpnn_lipschitz_constants(&NetworkConstants { k: 1.0, l: 2.0, b: 2.0, t: 1, d: 1.0 }, 2.0, HiddenCoeff::Six);
    eq("T=1,K=1,L=B=2,r=2", "lipschitz_readout", c.l_h.value.unwrap_or(f64::INFINITY), 1152.0, 1e-12);
    let e = recurrence(&[2.0; 3], &[1.0; 3], 0.0)?;
    eq("a=2,b=1,e0=0", "recurrence_e3", e[3], 7.0, 0.0);
    Ok(rows)
}

fn multinomial(ctx: &Ctx) -> Result<(Vec<Row>, Vec<PlotData>)> {
    let trials = ctx.cfg.trials_or(500);
    let rep = multinomial_check(4, 10_000, 0.05, trials, None, ctx.cfg.seed)?;
    let rows = vec![ctx.row(
        "J=4,N=10000,p=0.05",
        "violation_rate",
        rep.rate,
        rep.allowed,
        rep.pass,
    )];
    let plot = PlotData {
        name: "multinomial".into(),
        header: vec!["simulation".into(), "deviation".into(), "threshold".into()],
        rows: rep
            .deviations
            .iter()
            .enumerate()
            .map(|(i, &d)| vec![i as f64, d, rep.threshold])
            .collect(),
    };
    Ok((rows, vec![plot]))
}

/// Runs `cfg` and writes its artifacts to `dir`.
pub fn run_and_write(cfg: &ExperimentConfig, dir: &Path) -> Result<Outcome> {
    let out = run_suite(cfg)?;
    out.write(dir, cfg)?;
    Ok(out)
}

/// Checks a suite name without running it.
pub fn check_suite(name: &str) -> Result<()> {
    if SUITES.contains(&name) {
        Ok(())
    } else {
        bail!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))
    }
}
