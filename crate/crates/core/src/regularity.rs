//! Stepping operator, equitizing, and the greedy weak regularity decomposition.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norms::{cut_metric, cut_norm_kernel, kernel_lp, rectangle_mass, CutNormOptions};
use crate::signal::{Partition, StepKernelSignal};

/// Checks that `grouping` maps parts onto `0..g` with every group used;
/// returns `g`.
fn group_count(grouping: &[usize], n: usize) -> Result<usize> {
    if grouping.len() != n {
        return Err(Error::InvalidArgument(format!(
            "grouping has {} entries for {n} parts",
            grouping.len()
        )));
    }
    let g = grouping.iter().max().map_or(0, |&m| m + 1);
    let mut used = vec![false; g];
    for &k in grouping {
        used[k] = true;
    }
    if let Some(k) = used.iter().position(|u| !u) {
        return Err(Error::InvalidArgument(format!("group {k} is empty")));
    }
    Ok(g)
}

/// Projection onto a coarser partition: values become mass-weighted averages
/// over groups. `grouping[i]` is the group of part `i`.
pub fn stepping(x: &StepKernelSignal, grouping: &[usize]) -> Result<StepKernelSignal> {
    let g = group_count(grouping, x.n())?;
    let mu = x.masses();
    let mut mass = vec![0.0; g];
    for (i, &k) in grouping.iter().enumerate() {
        mass[k] += mu[i];
    }
    let mut kernel = Matrix::zeros(g, g);
    let mut signal = Matrix::zeros(g, x.d());
    for (i, &a) in grouping.iter().enumerate() {
        for (j, &b) in grouping.iter().enumerate() {
            let v = kernel.get(a, b) + mu[i] * mu[j] * x.kernel().get(i, j);
            kernel.set(a, b, v);
        }
        for c in 0..x.d() {
            let v = signal.get(a, c) + mu[i] * x.signal().get(i, c);
            signal.set(a, c, v);
        }
    }
    // the two triangles accumulate in different orders; keep symmetry exact
    let symmetric = x.kernel().is_symmetric();
    let kernel = Matrix::from_fn(g, g, |a, b| {
        let v = if symmetric {
            0.5 * (kernel.get(a, b) + kernel.get(b, a))
        } else {
            kernel.get(a, b)
        };
        v / (mass[a] * mass[b])
    });
    let signal = Matrix::from_fn(g, x.d(), |a, c| signal.get(a, c) / mass[a]);
    Ok(StepKernelSignal::new_unchecked(
        Partition::from_masses_unchecked(mass),
        kernel,
        signal,
        x.class(),
        x.radius(),
    ))
}

/// Writes a coarse object back onto the fine partition it was stepped from.
pub fn lift(coarse: &StepKernelSignal, grouping: &[usize], fine: &Partition) -> StepKernelSignal {
    let n = grouping.len();
    StepKernelSignal::new_unchecked(
        fine.clone(),
        Matrix::from_fn(n, n, |i, j| coarse.kernel().get(grouping[i], grouping[j])),
        Matrix::from_fn(n, coarse.d(), |i, c| coarse.signal().get(grouping[i], c)),
        coarse.class(),
        coarse.radius(),
    )
}

fn key(v: f64) -> u64 {
    // +0 and -0 are the same value
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

/// Groups parts that are indistinguishable: equal kernel rows, equal kernel
/// columns and equal signal rows. Groups are numbered by first occurrence.
pub fn twin_classes(x: &StepKernelSignal) -> Vec<usize> {
    let n = x.n();
    let mut ids: HashMap<Vec<u64>, usize> = HashMap::new();
    (0..n)
        .map(|i| {
            let sig: Vec<u64> = x
                .kernel()
                .row(i)
                .iter()
                .copied()
                .chain((0..n).map(|j| x.kernel().get(j, i)))
                .chain(x.signal().row(i).iter().copied())
                .map(key)
                .collect();
            let next = ids.len();
            *ids.entry(sig).or_insert(next)
        })
        .collect()
}

/// Merges twin parts into one part carrying their total mass. Values are
/// copied, not averaged, so the merged object is the same step function.
pub fn merge_twins(x: &StepKernelSignal) -> (StepKernelSignal, Vec<usize>) {
    let grouping = twin_classes(x);
    let g = grouping.iter().max().map_or(0, |&m| m + 1);
    let mut rep = vec![usize::MAX; g];
    let mut mass = vec![0.0; g];
    for (i, &k) in grouping.iter().enumerate() {
        if rep[k] == usize::MAX {
            rep[k] = i;
        }
        mass[k] += x.masses()[i];
    }
    let merged = StepKernelSignal::new_unchecked(
        Partition::from_masses_unchecked(mass),
        Matrix::from_fn(g, g, |a, b| x.kernel().get(rep[a], rep[b])),
        Matrix::from_fn(g, x.d(), |a, c| x.signal().get(rep[a], c)),
        x.class(),
        x.radius(),
    );
    (merged, grouping)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equitized {
    pub partition: Partition,
    /// For each new part, the `(source part, mass)` pieces it is made of.
    pub fragments: Vec<Vec<(usize, f64)>>,
    /// Whether the new part was cut from the residual pool.
    pub pool: Vec<bool>,
}

/// Splits a partition into `n` equal parts: each source part of mass `mu`
/// contributes `floor(mu * n)` whole parts, and the leftovers are pooled and
/// cut into the remaining parts in order.
pub fn equitize(p: &Partition, n: usize) -> Result<Equitized> {
    let k = p.len();
    if n <= k {
        return Err(Error::InvalidArgument(format!(
            "equitizing {k} parts needs more than {k} target parts, got {n}"
        )));
    }
    let unit = 1.0 / n as f64;
    let mut fragments = Vec::with_capacity(n);
    let mut pool_flags = Vec::with_capacity(n);
    let mut leftovers = Vec::new();
    for (i, &m) in p.masses().iter().enumerate() {
        let full = ((m * n as f64) + 1e-9).floor() as usize;
        for _ in 0..full {
            fragments.push(vec![(i, unit)]);
            pool_flags.push(false);
        }
        let rest = m - full as f64 * unit;
        if rest > 1e-15 {
            leftovers.push((i, rest));
        }
    }
    let pool_parts = n - fragments.len();
    let mut current: Vec<(usize, f64)> = Vec::new();
    let mut filled = 0.0;
    let mut made = 0;
    for (i, mut rest) in leftovers {
        while rest > 1e-15 {
            let take = if made + 1 == pool_parts {
                rest
            } else {
                rest.min(unit - filled)
            };
            current.push((i, take));
            filled += take;
            rest -= take;
            if made + 1 < pool_parts && filled >= unit - 1e-15 {
                fragments.push(std::mem::take(&mut current));
                pool_flags.push(true);
                made += 1;
                filled = 0.0;
            }
        }
    }
    if !current.is_empty() {
        fragments.push(current);
        pool_flags.push(true);
    }
    while fragments.len() < n {
        // only reachable through rounding when the pool is empty
        fragments.push(Vec::new());
        pool_flags.push(true);
    }
    Ok(Equitized {
        partition: Partition::uniform(n),
        fragments,
        pool: pool_flags,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    /// `||W - W'||_1` on the common refinement.
    pub kernel_l1: f64,
    pub kernel_bound: f64,
    /// Largest per-channel `||f_c - f'_c||_1`.
    pub signal_l1: f64,
    pub signal_bound: f64,
}

impl Perturbation {
    pub fn holds(&self, slack: f64) -> bool {
        self.kernel_l1 <= self.kernel_bound + slack && self.signal_l1 <= self.signal_bound + slack
    }
}

/// The equitized step object: whole parts keep their source values, pool parts
/// carry zero. Also returns the L1 perturbation and its bound
/// `p * ||F||_inf * k / n` (`p = 2` for the kernel, `p = 1` per channel).
pub fn equitize_step(x: &StepKernelSignal, n: usize) -> Result<(StepKernelSignal, Equitized, Perturbation)> {
    let eq = equitize(x.partition(), n)?;
    let src = |a: usize| (!eq.pool[a]).then(|| eq.fragments[a][0].0);
    let kernel = Matrix::from_fn(n, n, |a, b| match (src(a), src(b)) {
        (Some(i), Some(j)) => x.kernel().get(i, j),
        _ => 0.0,
    });
    let signal = Matrix::from_fn(n, x.d(), |a, c| src(a).map_or(0.0, |i| x.signal().get(i, c)));
    let atoms: Vec<(usize, usize, f64)> = eq
        .fragments
        .iter()
        .enumerate()
        .flat_map(|(a, fr)| fr.iter().map(move |&(i, m)| (a, i, m)))
        .collect();
    let mut kernel_l1 = 0.0;
    for &(a, i, ma) in &atoms {
        for &(b, j, mb) in &atoms {
            kernel_l1 += ma * mb * (x.kernel().get(i, j) - kernel.get(a, b)).abs();
        }
    }
    let signal_l1 = (0..x.d())
        .map(|c| {
            atoms
                .iter()
                .map(|&(a, i, m)| m * (x.signal().get(i, c) - signal.get(a, c)).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    let k = x.n() as f64;
    let pert = Perturbation {
        kernel_l1,
        kernel_bound: 2.0 * x.kernel().max_abs() * k / n as f64,
        signal_l1,
        signal_bound: x.signal().max_abs() * k / n as f64,
    };
    let y = StepKernelSignal::new_unchecked(eq.partition.clone(), kernel, signal, x.class(), x.radius());
    Ok((y, eq, pert))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub gamma: f64,
    #[serde(rename = "S")]
    pub s: Vec<usize>,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub terms: Vec<Term>,
    /// Cut norm of the residual left after all steps.
    pub residual_cutnorm_estimate: f64,
    /// Witness value found at each step, i.e. the residual cut norm before it.
    pub witness_values: Vec<f64>,
    /// `||R_i||_2` for `i = 0..=steps`; never increases.
    pub residual_l2: Vec<f64>,
    pub steps: usize,
    pub exact: bool,
    pub residual: Matrix,
}

impl Decomposition {
    /// `sum gamma * 1_{S x T}` on the part grid.
    pub fn reconstruct(&self, n: usize) -> Matrix {
        let mut out = Matrix::zeros(n, n);
        for term in &self.terms {
            for &i in &term.s {
                for &j in &term.t {
                    out.set(i, j, out.get(i, j) + term.gamma);
                }
            }
        }
        out
    }
}

/// Greedy decomposition: repeatedly take a cut norm witness `(S, T)` of the
/// residual and subtract its block average on `S x T`.
pub fn weak_regularity_decompose(
    x: &StepKernelSignal,
    m: usize,
    opts: &CutNormOptions,
) -> Result<Decomposition> {
    if m == 0 {
        return Err(Error::InvalidArgument("at least one step is required".into()));
    }
    let mu = x.masses();
    let mut residual = x.kernel().clone();
    let mut terms = Vec::with_capacity(m);
    let mut witness_values = Vec::with_capacity(m);
    let mut residual_l2 = vec![kernel_lp(&residual, mu).1];
    let mut exact = true;
    for _ in 0..m {
        let w = cut_norm_kernel(&residual, mu, opts)?;
        exact &= w.exact;
        witness_values.push(w.value);
        let ms: f64 = w.witness_s.iter().map(|&i| mu[i]).sum();
        let mt: f64 = w.witness_t.iter().map(|&j| mu[j]).sum();
        let gamma = if ms > 0.0 && mt > 0.0 {
            rectangle_mass(&residual, mu, &w.witness_s, &w.witness_t) / (ms * mt)
        } else {
            0.0
        };
        for &i in &w.witness_s {
            for &j in &w.witness_t {
                residual.set(i, j, residual.get(i, j) - gamma);
            }
        }
        terms.push(Term {
            gamma,
            s: w.witness_s,
            t: w.witness_t,
        });
        residual_l2.push(kernel_lp(&residual, mu).1);
    }
    let last = cut_norm_kernel(&residual, mu, opts)?;
    exact &= last.exact;
    Ok(Decomposition {
        terms,
        residual_cutnorm_estimate: last.value,
        witness_values,
        residual_l2,
        steps: m,
        exact,
        residual,
    })
}

pub const DEFAULT_CEILING_C: f64 = 1.5;

/// Exponent coefficient in `n >= 2^ceil(coeff * c / eps^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityPreset {
    /// Coefficient 8.
    Conservative,
    /// Coefficient 2.
    Sharp,
}

impl RegularityPreset {
    pub fn coeff(self) -> f64 {
        match self {
            Self::Conservative => 8.0,
            Self::Sharp => 2.0,
        }
    }
}

/// Smallest `eps` the regularity guarantee certifies for `n` parts, or `None`
/// when `n < 2`.
pub fn regularity_ceiling(n: usize, c: f64, preset: RegularityPreset) -> Option<f64> {
    let bits = (n as f64).log2().floor();
    (bits >= 1.0).then(|| (preset.coeff() * c / bits).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepApproximation {
    pub projection: StepKernelSignal,
    pub grouping: Vec<usize>,
    /// Cut metric between the input and its lifted projection.
    pub gap: f64,
    pub exact: bool,
    pub ceiling: Option<f64>,
    pub preset: RegularityPreset,
    pub c: f64,
}

/// Groups parts by their membership pattern in the first witness sets of the
/// greedy decomposition, merges the lightest groups down to `n_target`, and
/// steps onto the result. Twin classes are used directly when few enough.
pub fn best_step_approximation(
    x: &StepKernelSignal,
    n_target: usize,
    opts: &CutNormOptions,
    c: f64,
    preset: RegularityPreset,
) -> Result<StepApproximation> {
    if n_target == 0 {
        return Err(Error::InvalidArgument("n_target must be at least 1".into()));
    }
    let twins = twin_classes(x);
    let twin_count = twins.iter().max().map_or(0, |&m| m + 1);
    let grouping = if twin_count <= n_target {
        twins
    } else {
        let steps = (usize::BITS - n_target.leading_zeros()) as usize;
        let dec = weak_regularity_decompose(x, steps.max(1), opts)?;
        let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
        let mut g: Vec<usize> = (0..x.n())
            .map(|i| {
                let sig: Vec<bool> = dec
                    .terms
                    .iter()
                    .flat_map(|t| [t.s.contains(&i), t.t.contains(&i)])
                    .collect();
                let next = ids.len();
                *ids.entry(sig).or_insert(next)
            })
            .collect();
        merge_lightest(&mut g, x.masses(), n_target);
        g
    };
    let projection = stepping(x, &grouping)?;
    let lifted = lift(&projection, &grouping, x.partition());
    let gap = cut_metric(x, &lifted, opts)?;
    Ok(StepApproximation {
        projection,
        grouping,
        gap: gap.value,
        exact: gap.exact,
        ceiling: regularity_ceiling(n_target, c, preset),
        preset,
        c,
    })
}

/// Merges the two lightest groups until at most `target` remain, then
/// renumbers groups by first occurrence.
fn merge_lightest(g: &mut [usize], masses: &[f64], target: usize) {
    loop {
        let count = g.iter().max().map_or(0, |&m| m + 1);
        let mut mass = vec![0.0; count];
        for (i, &k) in g.iter().enumerate() {
            mass[k] += masses[i];
        }
        let alive: Vec<usize> = (0..count).filter(|&k| mass[k] > 0.0).collect();
        if alive.len() <= target {
            break;
        }
        let mut order = alive.clone();
        order.sort_by(|&a, &b| mass[a].total_cmp(&mass[b]).then(a.cmp(&b)));
        let (keep, gone) = (order[0].min(order[1]), order[0].max(order[1]));
        for k in g.iter_mut() {
            if *k == gone {
                *k = keep;
            }
        }
    }
    let mut renum: HashMap<usize, usize> = HashMap::new();
    for k in g.iter_mut() {
        let next = renum.len();
        *k = *renum.entry(*k).or_insert(next);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::cut_norm_kernel_exact;
    use crate::signal::{KernelClass, Validate};

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn stepping_examples() {
        let x = StepKernelSignal::uniform(
            m(&[
                &[1.0, 1.0, 0.0, 0.0],
                &[1.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 1.0],
                &[0.0, 0.0, 1.0, 1.0],
            ]),
            m(&[&[1.0], &[0.0], &[0.5], &[0.5]]),
            KernelClass::Graphon,
            1.0,
        )
        .unwrap();
        let y = stepping(&x, &[0, 0, 1, 1]).unwrap();
        assert_eq!(y.kernel(), &m(&[&[1.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(y.signal(), &m(&[&[0.5], &[0.5]]));
        assert_eq!(y.masses(), &[0.5, 0.5]);
        assert!(y.is_valid());
        assert_eq!(stepping(&x, &[0, 1, 2, 3]).unwrap(), x);
        assert!(stepping(&x, &[0, 0, 2, 2]).is_err());
    }

    #[test]
    fn stepping_constant() {
        let x = StepKernelSignal::try_new(
            Partition::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap(),
            Matrix::filled(4, 4, 0.375),
            Matrix::filled(4, 2, -0.5),
            KernelClass::GeneralKernel,
            1.0,
        )
        .unwrap();
        for g in [[0, 0, 0, 0], [0, 1, 0, 1], [0, 1, 2, 2]] {
            let y = stepping(&x, &g).unwrap();
            assert!(y.kernel().as_slice().iter().all(|v| (v - 0.375).abs() < 1e-15));
            assert!(y.signal().as_slice().iter().all(|v| (v + 0.5).abs() < 1e-15));
        }
    }

    #[test]
    fn twins_merge() {
        let x = StepKernelSignal::uniform(
            m(&[&[0.5, 0.5, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.0, 1.0]]),
            m(&[&[1.0], &[1.0], &[0.0]]),
            KernelClass::Graphon,
            1.0,
        )
        .unwrap();
        let (y, g) = merge_twins(&x);
        assert_eq!(g, vec![0, 0, 1]);
        assert_eq!(y.n(), 2);
        assert!((y.masses()[0] - 2.0 / 3.0).abs() < 1e-15);
        let back = lift(&y, &g, x.partition());
        assert_eq!(back, x);
    }

    #[test]
    fn equitize_examples() {
        let e = equitize(&Partition::new(vec![0.5, 0.3, 0.2]).unwrap(), 5).unwrap();
        assert_eq!(e.partition.len(), 5);
        let srcs: Vec<Vec<usize>> = e.fragments.iter().map(|f| f.iter().map(|p| p.0).collect()).collect();
        assert_eq!(srcs, vec![vec![0], vec![0], vec![1], vec![2], vec![0, 1]]);
        assert_eq!(e.pool, vec![false, false, false, false, true]);
        for f in &e.fragments {
            let s: f64 = f.iter().map(|p| p.1).sum();
            assert!((s - 0.2).abs() < 1e-12);
        }

        let halves = equitize(&Partition::uniform(3), 6).unwrap();
        assert!(halves.pool.iter().all(|p| !p));
        assert_eq!(halves.fragments.iter().map(|f| f[0].0).collect::<Vec<_>>(), vec![0, 0, 1, 1, 2, 2]);

        let quarters = equitize(&Partition::uniform(1), 4).unwrap();
        assert_eq!(quarters.fragments.len(), 4);
        assert!(quarters.fragments.iter().all(|f| f == &vec![(0, 0.25)]));

        assert!(equitize(&Partition::uniform(3), 3).is_err());
    }

    #[test]
    fn equitize_perturbation_bound() {
        let x = StepKernelSignal::try_new(
            Partition::new(vec![0.13, 0.29, 0.58]).unwrap(),
            m(&[&[1.0, -0.5, 0.25], &[0.3, 0.9, -1.0], &[0.0, 0.7, 0.4]]),
            m(&[&[1.0, -1.0], &[0.5, 0.0], &[-0.25, 0.75]]),
            KernelClass::GeneralKernel,
            1.0,
        )
        .unwrap();
        for n in [4, 7, 10, 33] {
            let (y, _, p) = equitize_step(&x, n).unwrap();
            assert!(y.partition().is_equipartition());
            assert!(p.holds(1e-9), "{n}: {p:?}");
        }
    }

    #[test]
    fn single_block_recovered_in_one_step() {
        let x = StepKernelSignal::uniform(
            m(&[&[0.0, 0.0, 0.0], &[0.6, 0.6, 0.0], &[0.6, 0.6, 0.0]]),
            Matrix::zeros(3, 1),
            KernelClass::DirectedGraphon,
            1.0,
        )
        .unwrap();
        let d = weak_regularity_decompose(&x, 1, &CutNormOptions::exact()).unwrap();
        assert_eq!(d.terms[0].s, vec![1, 2]);
        assert_eq!(d.terms[0].t, vec![0, 1]);
        assert!((d.terms[0].gamma - 0.6).abs() < 1e-15);
        assert!(d.residual_cutnorm_estimate < 1e-15);
    }

    #[test]
    fn zero_kernel_decomposition() {
        let x = StepKernelSignal::uniform(Matrix::zeros(3, 3), Matrix::zeros(3, 1), KernelClass::Graphon, 1.0).unwrap();
        let d = weak_regularity_decompose(&x, 3, &CutNormOptions::exact()).unwrap();
        assert!(d.terms.iter().all(|t| t.gamma == 0.0));
        assert_eq!(d.residual_cutnorm_estimate, 0.0);
    }

    #[test]
    fn decomposition_reconstructs_and_meets_bound() {
        let k = Matrix::from_fn(8, 8, |i, j| {
            let (a, b) = (i.min(j), i.max(j));
            ((a * 31 + b * 17 + 7) % 11) as f64 / 10.0
        });
        let x = StepKernelSignal::uniform(k, Matrix::zeros(8, 1), KernelClass::Graphon, 1.0).unwrap();
        let (_, l2, _) = kernel_lp(x.kernel(), x.masses());
        for steps in [4, 9, 16] {
            let d = weak_regularity_decompose(&x, steps, &CutNormOptions::exact()).unwrap();
            let sum = d.reconstruct(8);
            for i in 0..8 {
                for j in 0..8 {
                    let v = sum.get(i, j) + d.residual.get(i, j);
                    assert!((v - x.kernel().get(i, j)).abs() < 1e-10);
                }
            }
            let oracle = cut_norm_kernel_exact(&d.residual, x.masses(), 22).unwrap().value;
            assert!((oracle - d.residual_cutnorm_estimate).abs() < 1e-12);
            assert!(d.residual_cutnorm_estimate <= l2 / (steps as f64).sqrt());
            assert!(d.residual_l2.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn best_step_examples() {
        let x = StepKernelSignal::uniform(
            m(&[&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0], &[0.0, 0.0, 0.5]]),
            m(&[&[1.0], &[1.0], &[0.0]]),
            KernelClass::Graphon,
            1.0,
        )
        .unwrap();
        let a = best_step_approximation(&x, 2, &CutNormOptions::exact(), DEFAULT_CEILING_C, RegularityPreset::Conservative)
            .unwrap();
        assert!(a.gap < 1e-12);
        assert_eq!(a.projection.n(), 2);

        let c = StepKernelSignal::uniform(Matrix::filled(4, 4, 0.3), Matrix::zeros(4, 1), KernelClass::Graphon, 1.0)
            .unwrap();
        let one = best_step_approximation(&c, 1, &CutNormOptions::exact(), 1.5, RegularityPreset::Sharp).unwrap();
        assert!(one.gap < 1e-12);
        assert_eq!(one.ceiling, None);
        assert_eq!(regularity_ceiling(16, 2.0, RegularityPreset::Sharp), Some(1.0));
    }
}
