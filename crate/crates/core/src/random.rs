//! Seeded generators for partitions, step kernel-signals, graph-signals and
//! MPNNs. Used by the property tests and the experiment harness.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::matrix::Matrix;
use crate::mpnn::{FuncSpec, Layer, MessagePair, MpnnSpec, Op};
use crate::rng::{self, Rng};
use crate::signal::{GraphSignal, KernelClass, Partition, StepKernelSignal};

pub const ALL_CLASSES: [KernelClass; 4] = [
    KernelClass::Graphon,
    KernelClass::DirectedGraphon,
    KernelClass::SymmetricKernel,
    KernelClass::GeneralKernel,
];

/// `n` parts; equal masses or masses drawn from `[0.2, 1]` and normalized.
pub fn partition(n: usize, equal: bool, g: &mut Rng) -> Partition {
    if equal {
        return Partition::uniform(n);
    }
    let raw: Vec<f64> = (0..n).map(|_| g.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut masses: Vec<f64> = raw.iter().map(|m| m / total).collect();
    // put the rounding error on the last part so the masses sum to one
    let head: f64 = masses[..n - 1].iter().sum();
    masses[n - 1] = 1.0 - head;
    Partition::from_masses_unchecked(masses)
}

/// Kernel values in the class range; symmetric when the class requires it.
pub fn kernel(n: usize, class: KernelClass, g: &mut Rng) -> Matrix {
    let (lo, hi) = class.value_range();
    let mut w = Matrix::from_fn(n, n, |_, _| g.gen_range(lo..=hi));
    if class.requires_symmetry() {
        for i in 0..n {
            for j in 0..i {
                let v = w.get(i, j);
                w.set(j, i, v);
            }
        }
    }
    w
}

/// Entries uniform in `[-r, r]`.
pub fn signal(n: usize, d: usize, r: f64, g: &mut Rng) -> Matrix {
    Matrix::from_fn(n, d, |_, _| g.gen_range(-r..=r))
}

pub fn step(n: usize, d: usize, class: KernelClass, r: f64, equal: bool, seed: u64) -> StepKernelSignal {
    let mut g = rng::rng(seed);
    let p = partition(n, equal, &mut g);
    let w = kernel(n, class, &mut g);
    let f = signal(n, d, r, &mut g);
    StepKernelSignal::new_unchecked(p, w, f, class, r)
}

/// Two objects on a shared partition, as needed by the cut metric.
pub fn step_pair(
    n: usize,
    d: usize,
    class: KernelClass,
    r: f64,
    equal: bool,
    seed: u64,
) -> (StepKernelSignal, StepKernelSignal) {
    let a = step(n, d, class, r, equal, seed);
    let mut g = rng::stream(seed, 1);
    let b = StepKernelSignal::new_unchecked(
        a.partition().clone(),
        kernel(n, class, &mut g),
        signal(n, d, r, &mut g),
        class,
        r,
    );
    (a, b)
}

/// A graph-signal; Graphon classes give 0/1 edges, kernel classes weights.
pub fn graph(n: usize, d: usize, class: KernelClass, r: f64, seed: u64) -> GraphSignal {
    let mut g = rng::rng(seed);
    let mut a = kernel(n, class, &mut g);
    if matches!(class, KernelClass::Graphon | KernelClass::DirectedGraphon) {
        a = a.map(|v| if v > 0.5 { 1.0 } else { 0.0 });
        for i in 0..n {
            a.set(i, i, 0.0);
        }
    }
    let f = signal(n, d, r, &mut g);
    GraphSignal {
        directed: class.is_directed(),
        weight_range: class.weight_range(),
        adjacency: a,
        features: f,
        r,
    }
}

/// A uniformly random permutation of `0..n`.
pub fn permutation(n: usize, g: &mut Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(g);
    p
}

/// Shape and scale of a random MPNN.
#[derive(Debug, Clone, PartialEq)]
pub struct MpnnShape {
    /// `d_0..d_T`.
    pub dims: Vec<usize>,
    /// Message width, shared by all layers.
    pub message: usize,
    /// Message pairs per layer.
    pub pairs: usize,
    /// Weight entries are uniform in `[-scale, scale]`.
    pub scale: f64,
    /// Bias entries are uniform in `[-bias, bias]`.
    pub bias: f64,
    pub readout: Option<usize>,
}

impl MpnnShape {
    pub fn new(dims: Vec<usize>, message: usize, pairs: usize) -> Self {
        Self {
            dims,
            message,
            pairs,
            scale: 0.5,
            bias: 0.1,
            readout: None,
        }
    }
}

fn func(input: usize, output: usize, s: &MpnnShape, g: &mut Rng) -> FuncSpec {
    let w = Matrix::from_fn(output, input, |_, _| g.gen_range(-s.scale..=s.scale));
    let b: Vec<f64> = (0..output).map(|_| g.gen_range(-s.bias..=s.bias)).collect();
    let act = match g.gen_range(0..3) {
        0 => Op::Tanh,
        1 => Op::Relu,
        _ => Op::Identity,
    };
    FuncSpec::affine(w, b).then(act)
}

pub fn mpnn(shape: &MpnnShape, seed: u64) -> MpnnSpec {
    let mut g = rng::rng(seed);
    let layers = shape
        .dims
        .windows(2)
        .map(|w| Layer {
            messages: (0..shape.pairs)
                .map(|_| MessagePair {
                    receiver: func(w[0], shape.message, shape, &mut g),
                    transmitter: func(w[0], shape.message, shape, &mut g),
                })
                .collect(),
            update: func(w[0] + shape.message, w[1], shape, &mut g),
        })
        .collect();
    let last = *shape.dims.last().expect("an MPNN needs dimensions");
    let readout = shape.readout.map(|out| func(last, out, shape, &mut g));
    MpnnSpec { layers, readout }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Validate;

    #[test]
    fn generated_objects_validate() {
        for (i, &class) in ALL_CLASSES.iter().enumerate() {
            for d in 1..=8 {
                let seed = (i * 10 + d) as u64;
                assert!(step(5, d, class, 1.0, d % 2 == 0, seed).validate().is_empty());
                assert!(graph(6, d, class, 2.0, seed).validate().is_empty());
                let (a, b) = step_pair(4, d, class, 1.0, false, seed);
                assert_eq!(a.partition(), b.partition());
            }
        }
    }

    #[test]
    fn generated_mpnn_checks() {
        let mut shape = MpnnShape::new(vec![2, 3, 1], 2, 2);
        shape.readout = Some(1);
        let m = mpnn(&shape, 3);
        m.check().unwrap();
        assert_eq!(m, mpnn(&shape, 3));
    }
}
