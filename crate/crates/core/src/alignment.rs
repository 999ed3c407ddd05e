//! Cut distance by minimizing the cut metric over relabelings of parts.
//!
//! Equipartitions are first refined to a common equipartition and the search
//! runs over permutations of the refined parts. For general partitions the
//! parts of both objects are laid out as consecutive intervals; the searched
//! object is the order of the second object's parts, and the cut metric is
//! evaluated on the overlay of the two interval layouts.
//!
//! Either way the result is an upper bound on the true cut distance, which
//! ranges over all measure preserving bijections.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::norms::{cut_metric, CutNormOptions};
use crate::rng;
use crate::signal::{refine_to_common, Partition, StepKernelSignal, DEFAULT_REFINE_CAP};

/// Largest part count for exhaustive permutation search.
pub const EXACT_PERMUTATION_CAP: usize = 8;

const OVERLAY_EPS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMode {
    /// Every permutation.
    Exact,
    /// Pairwise-swap hill climbing with multistart.
    LocalSearch,
    /// No search: the identity layout.
    Fixed,
}

impl AlignMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Self::Exact),
            "search" | "local_search" | "local-search" => Some(Self::LocalSearch),
            "fixed" => Some(Self::Fixed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignParams {
    pub mode: AlignMode,
    pub restarts: usize,
    pub seed: u64,
    /// Cap on the common refinement of two equipartitions.
    pub refine_cap: usize,
    pub cut: CutNormOptions,
}

impl Default for AlignParams {
    fn default() -> Self {
        Self {
            mode: AlignMode::LocalSearch,
            restarts: 8,
            seed: 0,
            refine_cap: DEFAULT_REFINE_CAP,
            cut: CutNormOptions::default(),
        }
    }
}

impl AlignParams {
    pub fn exact() -> Self {
        Self {
            mode: AlignMode::Exact,
            cut: CutNormOptions::exact(),
            ..Self::default()
        }
    }

    pub fn fixed(cut: CutNormOptions) -> Self {
        Self {
            mode: AlignMode::Fixed,
            cut,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentResult {
    pub distance: f64,
    /// Part `i` of the aligned second object is part `permutation[i]` of the
    /// (refined) second object.
    pub permutation: Vec<usize>,
    /// Parts of the partition on which the cut metric was evaluated.
    pub refinement_parts: usize,
    pub exact: bool,
    /// Best distance after each restart (local search only).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub restart_trace: Vec<f64>,
}

/// `x` relabeled so that part `i` of the result is part `p[i]` of `x`.
pub fn permute(x: &StepKernelSignal, p: &[usize]) -> Result<StepKernelSignal> {
    check_permutation(p, x.n())?;
    let m = x.masses();
    if let Some(i) = (0..p.len()).find(|&i| (m[p[i]] - m[i]).abs() > 1e-12) {
        return Err(Error::PartitionMismatch(format!(
            "part {i} has mass {} but its image part {} has mass {}",
            m[i], p[i], m[p[i]]
        )));
    }
    Ok(StepKernelSignal::new_unchecked(
        x.partition().clone(),
        x.kernel().permute_square(p),
        x.signal().permute_rows(p),
        x.class(),
        x.radius(),
    ))
}

fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if p.len() != n || p.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidArgument(format!(
            "{p:?} is not a permutation of {n} parts"
        )));
    }
    Ok(())
}

/// Lays out `a`'s parts in index order and `b`'s parts in `order`, and returns
/// both objects on the common refinement of the two interval partitions.
pub fn overlay(
    a: &StepKernelSignal,
    b: &StepKernelSignal,
    order: &[usize],
) -> Result<(StepKernelSignal, StepKernelSignal)> {
    check_permutation(order, b.n())?;
    let (ma, mb) = (a.masses(), b.masses());
    let mut atoms: Vec<(usize, usize, f64)> = Vec::new();
    let (mut i, mut j) = (0, 0);
    let (mut ea, mut eb) = (ma[0], mb[order[0]]);
    let mut pos = 0.0;
    while i < ma.len() && j < order.len() {
        let next = ea.min(eb);
        let mass = next - pos;
        if mass > OVERLAY_EPS {
            atoms.push((i, order[j], mass));
        }
        pos = next;
        if ea <= next + OVERLAY_EPS {
            i += 1;
            if i < ma.len() {
                ea += ma[i];
            }
        }
        if eb <= next + OVERLAY_EPS {
            j += 1;
            if j < order.len() {
                eb += mb[order[j]];
            }
        }
    }
    let masses: Vec<f64> = atoms.iter().map(|t| t.2).collect();
    let k = atoms.len();
    let lift = |x: &StepKernelSignal, pick: fn(&(usize, usize, f64)) -> usize| {
        StepKernelSignal::new_unchecked(
            Partition::from_masses_unchecked(masses.clone()),
            Matrix::from_fn(k, k, |s, t| x.kernel().get(pick(&atoms[s]), pick(&atoms[t]))),
            Matrix::from_fn(k, x.d(), |s, c| x.signal().get(pick(&atoms[s]), c)),
            x.class(),
            x.radius(),
        )
    };
    Ok((lift(a, |t| t.0), lift(b, |t| t.1)))
}

fn check_compatible(a: &StepKernelSignal, b: &StepKernelSignal) -> Result<()> {
    if a.class() != b.class() {
        return Err(Error::ClassMismatch(format!(
            "{} vs {}",
            a.class().name(),
            b.class().name()
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

/// Evaluates the cut metric for one candidate order of the second object.
struct Objective {
    a: StepKernelSignal,
    b: StepKernelSignal,
    equi: bool,
    cut: CutNormOptions,
}

impl Objective {
    fn parts(&self) -> usize {
        self.b.n()
    }

    fn eval(&self, p: &[usize]) -> Result<(f64, bool, usize)> {
        let (x, y) = if self.equi {
            (self.a.clone(), permute(&self.b, p)?)
        } else {
            overlay(&self.a, &self.b, p)?
        };
        let m = cut_metric(&x, &y, &self.cut)?;
        Ok((m.value, m.exact, x.n()))
    }
}

fn lex_better(a: &(f64, Vec<usize>), b: &(f64, Vec<usize>)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Next permutation in lexicographic order; false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Cut distance restricted to part relabelings.
pub fn cut_distance(
    a: &StepKernelSignal,
    b: &StepKernelSignal,
    params: &AlignParams,
) -> Result<AlignmentResult> {
    check_compatible(a, b)?;
    let equi = a.partition().is_equipartition() && b.partition().is_equipartition();
    let (a2, b2) = if equi {
        refine_to_common(a, b, params.refine_cap)?
    } else {
        (a.clone(), b.clone())
    };
    let obj = Objective {
        a: a2,
        b: b2,
        equi,
        cut: params.cut,
    };
    let n = obj.parts();
    match params.mode {
        AlignMode::Fixed => {
            let p: Vec<usize> = (0..n).collect();
            let (distance, exact, parts) = obj.eval(&p)?;
            Ok(AlignmentResult {
                distance,
                permutation: p,
                refinement_parts: parts,
                exact,
                restart_trace: Vec::new(),
            })
        }
        AlignMode::Exact => exact_search(&obj),
        AlignMode::LocalSearch => local_search(&obj, params.restarts, params.seed),
    }
}

fn exact_search(obj: &Objective) -> Result<AlignmentResult> {
    let n = obj.parts();
    if n > EXACT_PERMUTATION_CAP {
        return Err(Error::CapExceeded {
            what: "exact alignment",
            needed: n,
            cap: EXACT_PERMUTATION_CAP,
        });
    }
    let mut perms = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        perms.push(p.clone());
        if !next_permutation(&mut p) {
            break;
        }
    }
    let evals = perms
        .par_iter()
        .map(|p| obj.eval(p))
        .collect::<Result<Vec<_>>>()?;
    let all_exact = evals.iter().all(|e| e.1);
    let parts = evals[0].2;
    // permutations are in lexicographic order, so the first minimum wins ties
    let (best, _) = evals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, e)| if e.0 < bv { (i, e.0) } else { (bi, bv) });
    Ok(AlignmentResult {
        distance: evals[best].0,
        permutation: perms.swap_remove(best),
        refinement_parts: parts,
        exact: all_exact,
        restart_trace: Vec::new(),
    })
}

fn hill_climb(obj: &Objective, mut p: Vec<usize>) -> Result<(f64, Vec<usize>, bool)> {
    let n = p.len();
    let (mut value, mut exact, _) = obj.eval(&p)?;
    loop {
        let mut best: Option<(f64, Vec<usize>, bool)> = None;
        for i in 0..n {
            for j in i + 1..n {
                let mut q = p.clone();
                q.swap(i, j);
                let (v, e, _) = obj.eval(&q)?;
                exact &= e;
                if v < value && best.as_ref().map_or(true, |b| lex_better(&(v, q.clone()), &(b.0, b.1.clone()))) {
                    best = Some((v, q, e));
                }
            }
        }
        match best {
            Some((v, q, _)) => {
                value = v;
                p = q;
            }
            None => return Ok((value, p, exact)),
        }
    }
}

fn local_search(obj: &Objective, restarts: usize, seed: u64) -> Result<AlignmentResult> {
    let n = obj.parts();
    let starts: Vec<Vec<usize>> = (0..restarts.max(1))
        .map(|r| {
            let mut p: Vec<usize> = (0..n).collect();
            if r > 0 {
                p.shuffle(&mut rng::stream(seed, r as u64));
            }
            p
        })
        .collect();
    let runs = starts
        .into_par_iter()
        .map(|p| hill_climb(obj, p))
        .collect::<Result<Vec<_>>>()?;
    let mut trace = Vec::with_capacity(runs.len());
    let mut best: Option<(f64, Vec<usize>)> = None;
    for (v, p, _) in &runs {
        let cand = (*v, p.clone());
        if best.as_ref().map_or(true, |b| lex_better(&cand, b)) {
            best = Some(cand);
        }
        trace.push(best.as_ref().unwrap().0);
    }
    let (distance, permutation) = best.expect("at least one restart");
    let (_, _, parts) = obj.eval(&permutation)?;
    Ok(AlignmentResult {
        distance,
        permutation,
        refinement_parts: parts,
        // a search never certifies the minimum over permutations
        exact: false,
        restart_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::cut_norm_kernel_exact;
    use crate::signal::KernelClass;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn obj(k: Matrix, f: Matrix) -> StepKernelSignal {
        StepKernelSignal::uniform(k, f, KernelClass::GeneralKernel, 1.0).unwrap()
    }

    #[test]
    fn permute_identity_and_involution() {
        let x = obj(
            m(&[&[0.1, 0.2, 0.3], &[0.4, 0.5, 0.6], &[0.7, 0.8, 0.9]]),
            m(&[&[1.0], &[0.5], &[-1.0]]),
        );
        assert_eq!(permute(&x, &[0, 1, 2]).unwrap(), x);
        let t = permute(&x, &[1, 0, 2]).unwrap();
        assert_eq!(t.kernel().get(0, 1), 0.4);
        assert_eq!(permute(&t, &[1, 0, 2]).unwrap(), x);
        assert!(permute(&x, &[0, 0, 1]).is_err());
    }

    #[test]
    fn permute_rejects_mass_mismatch() {
        let x = StepKernelSignal::try_new(
            Partition::new(vec![0.25, 0.75]).unwrap(),
            Matrix::zeros(2, 2),
            Matrix::zeros(2, 1),
            KernelClass::Graphon,
            1.0,
        )
        .unwrap();
        assert!(matches!(permute(&x, &[1, 0]), Err(Error::PartitionMismatch(_))));
    }

    #[test]
    fn permuted_copy_has_distance_zero() {
        let a = obj(
            m(&[&[0.0, 0.5, -0.2], &[0.9, 0.1, 0.3], &[-0.4, 0.6, 1.0]]),
            m(&[&[1.0, 0.0], &[0.0, -1.0], &[0.5, 0.5]]),
        );
        let b = permute(&a, &[2, 0, 1]).unwrap();
        let r = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        assert_eq!(r.distance, 0.0);
        assert!(r.exact);
        let back = permute(&b, &r.permutation).unwrap();
        assert_eq!(back, a);
        let same = cut_distance(&a, &a, &AlignParams::exact()).unwrap();
        assert_eq!(same.permutation, vec![0, 1, 2]);
        assert_eq!(same.distance, 0.0);
    }

    #[test]
    fn swap_example_against_brute_force() {
        let a = obj(m(&[&[0.0, 1.0], &[1.0, 0.0]]), Matrix::zeros(2, 1));
        let b = obj(m(&[&[1.0, 0.0], &[0.0, 1.0]]), Matrix::zeros(2, 1));
        // both relabelings of b, each scored by an exhaustive cut norm
        let oracle = [[0usize, 1], [1, 0]]
            .iter()
            .map(|p| {
                let pb = b.kernel().permute_square(p);
                let d = a.kernel().sub(&pb).unwrap();
                cut_norm_kernel_exact(&d, &[0.5, 0.5], 22).unwrap().value
            })
            .fold(f64::INFINITY, f64::min);
        let r = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        assert_eq!(r.distance, oracle);
        assert_eq!(r.distance, 0.25);
    }

    #[test]
    fn refines_unequal_equipartitions() {
        let a = obj(Matrix::filled(2, 2, 0.5), Matrix::zeros(2, 1));
        let b = obj(Matrix::filled(3, 3, 0.5), Matrix::zeros(3, 1));
        let r = cut_distance(&a, &b, &AlignParams::default()).unwrap();
        assert_eq!(r.refinement_parts, 6);
        assert!(r.distance.abs() < 1e-15);
    }

    #[test]
    fn overlay_of_general_partitions() {
        let a = StepKernelSignal::try_new(
            Partition::new(vec![0.25, 0.75]).unwrap(),
            m(&[&[1.0, 0.0], &[0.0, 0.0]]),
            m(&[&[1.0], &[0.0]]),
            KernelClass::Graphon,
            1.0,
        )
        .unwrap();
        let b = StepKernelSignal::try_new(
            Partition::new(vec![0.75, 0.25]).unwrap(),
            m(&[&[0.0, 0.0], &[0.0, 1.0]]),
            m(&[&[0.0], &[1.0]]),
            KernelClass::Graphon,
            1.0,
        )
        .unwrap();
        let (x, y) = overlay(&a, &b, &[0, 1]).unwrap();
        assert_eq!(x.n(), 3);
        let fixed = cut_distance(&a, &b, &AlignParams::fixed(CutNormOptions::exact())).unwrap();
        assert!(fixed.distance > 0.1);
        assert_eq!(y.masses().len(), 3);
        let best = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        assert_eq!(best.permutation, vec![1, 0]);
        assert!(best.distance.abs() < 1e-15);
    }

    #[test]
    fn local_search_trace_is_monotone() {
        let a = obj(
            Matrix::from_fn(5, 5, |i, j| ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.4),
            Matrix::from_fn(5, 1, |i, _| i as f64 / 5.0),
        );
        let b = obj(
            Matrix::from_fn(5, 5, |i, j| ((i * 3 + j * 2) % 5) as f64 / 5.0 - 0.4),
            Matrix::from_fn(5, 1, |i, _| 1.0 - i as f64 / 5.0),
        );
        let params = AlignParams {
            restarts: 6,
            seed: 9,
            ..AlignParams::default()
        };
        let r = cut_distance(&a, &b, &params).unwrap();
        assert!(r.restart_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(!r.exact);
        let e = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        assert!(r.distance >= e.distance);
        assert_eq!(cut_distance(&a, &b, &params).unwrap(), r);
    }

    #[test]
    fn exact_cap() {
        let a = obj(Matrix::zeros(9, 9), Matrix::zeros(9, 1));
        assert!(matches!(
            cut_distance(&a, &a, &AlignParams::exact()),
            Err(Error::CapExceeded { .. })
        ));
    }
}
