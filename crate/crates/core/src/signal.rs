//! Step kernel-signals, graph-signals and the maps between them.
//!
//! A continuous kernel-signal `(W, f)` is stored as its values on the cells of a
//! finite weighted partition. Parts carry only a mass; where a part sits inside
//! `[0, 1]` never matters to any functional computed here.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::matrix::Matrix;

impl From<Partition> for Vec<f64> {
    fn from(p: Partition) -> Self {
        p.masses
    }
}

impl From<Vec<f64>> for Partition {
    fn from(masses: Vec<f64>) -> Self {
        Partition::from_masses_unchecked(masses)
    }
}

/// Absolute slack used when checking value ranges, symmetry and the signal radius.
const RANGE_SLACK: f64 = 1e-12;
const MASS_SLACK: f64 = 1e-12;

/// Default upper limit on the number of parts produced by [`refine_to_common`].
pub const DEFAULT_REFINE_CAP: usize = 4096;

/// Serialized as its list of masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<f64>", from = "Vec<f64>")]
pub struct Partition {
    masses: Vec<f64>,
    equipartition: bool,
}

impl Partition {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        let p = Self::from_masses_unchecked(masses);
        let v = p.validate();
        if v.is_empty() {
            Ok(p)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// Equipartition into `n` parts of mass `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform partition needs at least one part");
        Self {
            masses: vec![1.0 / n as f64; n],
            equipartition: true,
        }
    }

    pub fn from_masses_unchecked(masses: Vec<f64>) -> Self {
        let equipartition = match masses.first() {
            Some(&m0) => masses.iter().all(|&m| (m - m0).abs() <= MASS_SLACK),
            None => false,
        };
        Self {
            masses,
            equipartition,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn is_equipartition(&self) -> bool {
        self.equipartition
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.masses.is_empty() {
            out.push(Violation::new("part count", "masses"));
            return out;
        }
        for (i, &m) in self.masses.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                out.push(Violation::new("positive mass", format!("masses[{i}]")));
            }
        }
        let total: f64 = self.masses.iter().sum();
        if (total - 1.0).abs() > MASS_SLACK {
            out.push(Violation::new(
                "mass sum",
                format!("masses (sum = {total})"),
            ));
        }
        out
    }
}

/// The four kernel spaces: graphons, directed graphons, symmetric kernels and
/// general kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelClass {
    Graphon,
    DirectedGraphon,
    SymmetricKernel,
    GeneralKernel,
}

impl KernelClass {
    pub const ALL: [KernelClass; 4] = [
        KernelClass::Graphon,
        KernelClass::DirectedGraphon,
        KernelClass::SymmetricKernel,
        KernelClass::GeneralKernel,
    ];

    pub fn value_range(self) -> (f64, f64) {
        match self {
            KernelClass::Graphon | KernelClass::DirectedGraphon => (0.0, 1.0),
            KernelClass::SymmetricKernel | KernelClass::GeneralKernel => (-1.0, 1.0),
        }
    }

    pub fn requires_symmetry(self) -> bool {
        matches!(self, KernelClass::Graphon | KernelClass::SymmetricKernel)
    }

    pub fn from_graph(directed: bool, range: WeightRange) -> Self {
        match (directed, range) {
            (false, WeightRange::ZeroOne) => KernelClass::Graphon,
            (true, WeightRange::ZeroOne) => KernelClass::DirectedGraphon,
            (false, WeightRange::PlusMinusOne) => KernelClass::SymmetricKernel,
            (true, WeightRange::PlusMinusOne) => KernelClass::GeneralKernel,
        }
    }

    pub fn is_directed(self) -> bool {
        !self.requires_symmetry()
    }

    pub fn weight_range(self) -> WeightRange {
        match self {
            KernelClass::Graphon | KernelClass::DirectedGraphon => WeightRange::ZeroOne,
            _ => WeightRange::PlusMinusOne,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KernelClass::Graphon => "graphon",
            KernelClass::DirectedGraphon => "directed_graphon",
            KernelClass::SymmetricKernel => "symmetric_kernel",
            KernelClass::GeneralKernel => "general_kernel",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s || c.name().replace('_', "-") == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightRange {
    #[serde(rename = "01")]
    ZeroOne,
    #[serde(rename = "pm1")]
    PlusMinusOne,
}

impl WeightRange {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            WeightRange::ZeroOne => (0.0, 1.0),
            WeightRange::PlusMinusOne => (-1.0, 1.0),
        }
    }
}

/// Anything with checkable type invariants.
pub trait Validate {
    /// Every broken invariant; empty iff the object is valid.
    fn validate(&self) -> Vec<Violation>;

    fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

/// A kernel `W` and a `d`-channel signal `f`, both piecewise constant on a
/// weighted partition.
#[derive(Debug, Clone, PartialEq)]
pub struct StepKernelSignal {
    partition: Partition,
    kernel: Matrix,
    signal: Matrix,
    class: KernelClass,
    radius: f64,
}

impl StepKernelSignal {
    pub fn try_new(
        partition: Partition,
        kernel: Matrix,
        signal: Matrix,
        class: KernelClass,
        radius: f64,
    ) -> Result<Self> {
        let x = Self::new_unchecked(partition, kernel, signal, class, radius);
        let v = x.validate();
        if v.is_empty() {
            Ok(x)
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn new_unchecked(
        partition: Partition,
        kernel: Matrix,
        signal: Matrix,
        class: KernelClass,
        radius: f64,
    ) -> Self {
        Self {
            partition,
            kernel,
            signal,
            class,
            radius,
        }
    }

    /// Uniform-mass object; convenient for tests and generators.
    pub fn uniform(
        kernel: Matrix,
        signal: Matrix,
        class: KernelClass,
        radius: f64,
    ) -> Result<Self> {
        let n = kernel.rows();
        if n == 0 {
            return Err(Error::InvalidArgument("empty kernel".into()));
        }
        Self::try_new(Partition::uniform(n), kernel, signal, class, radius)
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn masses(&self) -> &[f64] {
        self.partition.masses()
    }

    pub fn kernel(&self) -> &Matrix {
        &self.kernel
    }

    pub fn signal(&self) -> &Matrix {
        &self.signal
    }

    pub fn class(&self) -> KernelClass {
        self.class
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of parts.
    pub fn n(&self) -> usize {
        self.partition.len()
    }

    /// Signal channels.
    pub fn d(&self) -> usize {
        self.signal.cols()
    }

    pub fn with_signal(&self, signal: Matrix) -> Self {
        Self {
            signal,
            ..self.clone()
        }
    }

    pub fn with_radius(&self, radius: f64) -> Self {
        Self {
            radius,
            ..self.clone()
        }
    }

    pub fn with_class(&self, class: KernelClass) -> Self {
        Self {
            class,
            ..self.clone()
        }
    }

    /// Splits every part into `factor` equal sub-parts, replicating values.
    pub fn refine_uniform(&self, factor: usize) -> Self {
        assert!(factor >= 1);
        if factor == 1 {
            return self.clone();
        }
        let n = self.n() * factor;
        let masses = self
            .masses()
            .iter()
            .flat_map(|&m| std::iter::repeat(m / factor as f64).take(factor))
            .collect();
        let src = |i: usize| i / factor;
        Self {
            partition: Partition::from_masses_unchecked(masses),
            kernel: Matrix::from_fn(n, n, |i, j| self.kernel.get(src(i), src(j))),
            signal: Matrix::from_fn(n, self.d(), |i, c| self.signal.get(src(i), c)),
            class: self.class,
            radius: self.radius,
        }
    }
}

impl Validate for StepKernelSignal {
    fn validate(&self) -> Vec<Violation> {
        let mut out = self.partition.validate();
        let n = self.partition.len();
        if n == 0 {
            return out;
        }
        if self.kernel.rows() != n || self.kernel.cols() != n {
            out.push(Violation::new(
                "shape",
                format!("kernel is {}x{}, expected {n}x{n}", self.kernel.rows(), self.kernel.cols()),
            ));
            return out;
        }
        if self.signal.rows() != n {
            out.push(Violation::new(
                "shape",
                format!("signal has {} rows, expected {n}", self.signal.rows()),
            ));
            return out;
        }
        if self.signal.cols() == 0 {
            out.push(Violation::new("shape", "signal has no channels"));
        }
        check_kernel(
            &self.kernel,
            self.class.value_range(),
            self.class.requires_symmetry(),
            &mut out,
        );
        check_signal(&self.signal, self.radius, &mut out);
        out
    }
}

/// Graph with node features; adjacency may be weighted, signed and directed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSignal {
    pub directed: bool,
    #[serde(rename = "range")]
    pub weight_range: WeightRange,
    pub adjacency: Matrix,
    pub features: Matrix,
    pub r: f64,
}

impl GraphSignal {
    pub fn try_new(
        adjacency: Matrix,
        features: Matrix,
        directed: bool,
        weight_range: WeightRange,
        r: f64,
    ) -> Result<Self> {
        let g = Self {
            directed,
            weight_range,
            adjacency,
            features,
            r,
        };
        let v = g.validate();
        if v.is_empty() {
            Ok(g)
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn n(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn d(&self) -> usize {
        self.features.cols()
    }

    pub fn class(&self) -> KernelClass {
        KernelClass::from_graph(self.directed, self.weight_range)
    }

    /// Relabels nodes: node `i` of the result is node `p[i]` of `self`.
    pub fn relabel(&self, p: &[usize]) -> Self {
        Self {
            directed: self.directed,
            weight_range: self.weight_range,
            adjacency: self.adjacency.permute_square(p),
            features: self.features.permute_rows(p),
            r: self.r,
        }
    }
}

impl Validate for GraphSignal {
    fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.adjacency.rows();
        if n == 0 {
            out.push(Violation::new("part count", "adjacency is empty"));
            return out;
        }
        if self.adjacency.cols() != n {
            out.push(Violation::new("shape", "adjacency is not square"));
            return out;
        }
        if self.features.rows() != n {
            out.push(Violation::new(
                "shape",
                format!("features have {} rows, expected {n}", self.features.rows()),
            ));
            return out;
        }
        if self.features.cols() == 0 {
            out.push(Violation::new("shape", "features have no channels"));
        }
        check_kernel(
            &self.adjacency,
            self.weight_range.bounds(),
            !self.directed,
            &mut out,
        );
        check_signal(&self.features, self.r, &mut out);
        out
    }
}

fn check_kernel(k: &Matrix, (lo, hi): (f64, f64), symmetric: bool, out: &mut Vec<Violation>) {
    let n = k.rows();
    for i in 0..n {
        for j in 0..n {
            let v = k.get(i, j);
            if !v.is_finite() {
                out.push(Violation::new("finite", format!("kernel[{i}][{j}]")));
            } else if v < lo - RANGE_SLACK || v > hi + RANGE_SLACK {
                out.push(Violation::new("value range", format!("kernel[{i}][{j}] = {v}")));
            }
            if symmetric && j < i && (v - k.get(j, i)).abs() > RANGE_SLACK {
                out.push(Violation::new("symmetry", format!("kernel[{j}][{i}] vs kernel[{i}][{j}]")));
            }
        }
    }
}

fn check_signal(f: &Matrix, r: f64, out: &mut Vec<Violation>) {
    if !(r.is_finite() && r > 0.0) {
        out.push(Violation::new("positive radius", format!("r = {r}")));
        return;
    }
    for (i, row) in f.iter_rows().enumerate() {
        if row.iter().any(|v| !v.is_finite()) {
            out.push(Violation::new("finite", format!("signal[{i}]")));
            continue;
        }
        let m = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if m > r + RANGE_SLACK {
            out.push(Violation::new("signal radius", format!("signal[{i}] has |.|_inf = {m} > r = {r}")));
        }
    }
}

/// The step kernel-signal induced by a graph-signal: node `i` becomes a part of
/// mass `1/n` carrying row `i` of the adjacency and of the features.
pub fn induce(g: &GraphSignal) -> Result<StepKernelSignal> {
    let v = g.validate();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    Ok(StepKernelSignal::new_unchecked(
        Partition::uniform(g.n()),
        g.adjacency.clone(),
        g.features.clone(),
        g.class(),
        g.r,
    ))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Places two equipartition objects on the equipartition with `lcm(n_a, n_b)`
/// parts by blockwise replication.
pub fn refine_to_common(
    a: &StepKernelSignal,
    b: &StepKernelSignal,
    cap: usize,
) -> Result<(StepKernelSignal, StepKernelSignal)> {
    for (name, x) in [("first", a), ("second", b)] {
        if !x.partition().is_equipartition() {
            return Err(Error::PartitionMismatch(format!(
                "{name} argument is not an equipartition"
            )));
        }
    }
    let n = lcm(a.n(), b.n());
    if n > cap {
        return Err(Error::CapExceeded {
            what: "common refinement",
            needed: n,
            cap,
        });
    }
    Ok((a.refine_uniform(n / a.n()), b.refine_uniform(n / b.n())))
}
