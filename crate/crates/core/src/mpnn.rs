//! Message passing networks with normalized sum aggregation, on graph-signals
//! and on step kernel-signals.
//!
//! Every learnable function is a chain of affine maps and 1-Lipschitz scalar
//! activations, so its Lipschitz constant (in the sup norm) and its formal bias
//! `|g(0)|_inf` can be certified from the chain itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::signal::{induce, GraphSignal, StepKernelSignal, Validate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Op {
    Affine { weight: Matrix, bias: Vec<f64> },
    Identity,
    Relu,
    Tanh,
    Clamp { lo: f64, hi: f64 },
}

impl Op {
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Op::Affine { weight, bias } => weight
                .mul_vec(x)
                .into_iter()
                .zip(bias)
                .map(|(a, b)| a + b)
                .collect(),
            Op::Identity => x.to_vec(),
            Op::Relu => x.iter().map(|v| v.max(0.0)).collect(),
            Op::Tanh => x.iter().map(|v| v.tanh()).collect(),
            Op::Clamp { lo, hi } => x.iter().map(|v| v.clamp(*lo, *hi)).collect(),
        }
    }
}

/// `R^input -> R^output` as a chain of ops applied left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuncSpec {
    pub input: usize,
    pub output: usize,
    pub chain: Vec<Op>,
}

impl FuncSpec {
    pub fn identity(dim: usize) -> Self {
        Self {
            input: dim,
            output: dim,
            chain: Vec::new(),
        }
    }

    pub fn affine(weight: Matrix, bias: Vec<f64>) -> Self {
        Self {
            input: weight.cols(),
            output: weight.rows(),
            chain: vec![Op::Affine { weight, bias }],
        }
    }

    /// The constant map `x -> value`, as an affine map with zero weight.
    pub fn constant(input: usize, value: Vec<f64>) -> Self {
        Self::affine(Matrix::zeros(value.len(), input), value)
    }

    pub fn then(mut self, op: Op) -> Self {
        if let Op::Affine { weight, .. } = &op {
            self.output = weight.rows();
        }
        self.chain.push(op);
        self
    }

    /// Checks the dimension chain.
    pub fn check(&self) -> Result<()> {
        let mut dim = self.input;
        for (i, op) in self.chain.iter().enumerate() {
            match op {
                Op::Affine { weight, bias } => {
                    if weight.cols() != dim || bias.len() != weight.rows() {
                        return Err(Error::Dimension(format!(
                            "op {i}: {}x{} weight with bias of {} after width {dim}",
                            weight.rows(),
                            weight.cols(),
                            bias.len()
                        )));
                    }
                    if weight.as_slice().iter().chain(bias).any(|v| !v.is_finite()) {
                        return Err(Error::InvalidArgument(format!("op {i}: non-finite parameter")));
                    }
                    dim = weight.rows();
                }
                Op::Clamp { lo, hi } if !(lo <= hi) => {
                    return Err(Error::InvalidArgument(format!("op {i}: clamp [{lo}, {hi}]")));
                }
                _ => {}
            }
        }
        if dim != self.output {
            return Err(Error::Dimension(format!(
                "chain ends at width {dim}, declared output {}",
                self.output
            )));
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.input);
        self.chain.iter().fold(x.to_vec(), |v, op| op.apply(&v))
    }

    /// Product of the affine operator sup-norms; activations are 1-Lipschitz.
    pub fn lipschitz(&self) -> f64 {
        self.chain
            .iter()
            .map(|op| match op {
                Op::Affine { weight, .. } => weight.inf_norm(),
                _ => 1.0,
            })
            .product()
    }

    /// `|g(0)|_inf`.
    pub fn formal_bias(&self) -> f64 {
        self.eval(&vec![0.0; self.input])
            .iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// One receiver/transmitter pair of a message function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessagePair {
    pub receiver: FuncSpec,
    pub transmitter: FuncSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub messages: Vec<MessagePair>,
    /// Takes the concatenation of the node state and its aggregated message.
    pub update: FuncSpec,
}

impl Layer {
    pub fn input_dim(&self) -> usize {
        self.messages
            .first()
            .map_or(self.update.input, |m| m.receiver.input)
    }

    pub fn message_dim(&self) -> usize {
        self.messages.first().map_or(0, |m| m.receiver.output)
    }

    pub fn output_dim(&self) -> usize {
        self.update.output
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpnnSpec {
    pub layers: Vec<Layer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<FuncSpec>,
}

impl MpnnSpec {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// `(d_0..d_T, p_0..p_{T-1})`.
    pub fn dims(&self) -> (Vec<usize>, Vec<usize>) {
        let mut d: Vec<usize> = self.layers.first().map(Layer::input_dim).into_iter().collect();
        d.extend(self.layers.iter().map(Layer::output_dim));
        let p = self.layers.iter().map(Layer::message_dim).collect();
        (d, p)
    }

    pub fn input_dim(&self) -> Option<usize> {
        self.layers.first().map(Layer::input_dim)
    }

    /// Checks every chain and the layer-to-layer dimension schedule.
    pub fn check(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::InvalidArgument("an MPNN needs at least one layer".into()));
        }
        let mut dim = self.layers[0].input_dim();
        for (t, layer) in self.layers.iter().enumerate() {
            if layer.messages.is_empty() {
                return Err(Error::InvalidArgument(format!("layer {t} has no message pairs")));
            }
            let p = layer.message_dim();
            for (k, pair) in layer.messages.iter().enumerate() {
                for (name, f) in [("receiver", &pair.receiver), ("transmitter", &pair.transmitter)] {
                    f.check()?;
                    if f.input != dim || f.output != p {
                        return Err(Error::Dimension(format!(
                            "layer {t} pair {k} {name} maps {} -> {}, expected {dim} -> {p}",
                            f.input, f.output
                        )));
                    }
                }
            }
            layer.update.check()?;
            if layer.update.input != dim + p {
                return Err(Error::Dimension(format!(
                    "layer {t} update takes {}, expected {dim} + {p}",
                    layer.update.input
                )));
            }
            dim = layer.update.output;
        }
        if let Some(psi) = &self.readout {
            psi.check()?;
            if psi.input != dim {
                return Err(Error::Dimension(format!(
                    "readout takes {}, last layer gives {dim}",
                    psi.input
                )));
            }
        }
        Ok(())
    }

    fn funcs(&self) -> impl Iterator<Item = &FuncSpec> {
        self.layers
            .iter()
            .flat_map(|l| {
                l.messages
                    .iter()
                    .flat_map(|m| [&m.receiver, &m.transmitter])
                    .chain(std::iter::once(&l.update))
            })
            .chain(self.readout.iter())
    }
}

/// `phi(a, b) = sum_k rec_k(a) * trans_k(b)` elementwise.
pub fn message(layer: &Layer, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    let d = layer.input_dim();
    if a.len() != d || b.len() != d {
        return Err(Error::Dimension(format!(
            "message inputs of width {} and {}, expected {d}",
            a.len(),
            b.len()
        )));
    }
    let mut out = vec![0.0; layer.message_dim()];
    for pair in &layer.messages {
        let r = pair.receiver.eval(a);
        let s = pair.transmitter.eval(b);
        for ((o, x), y) in out.iter_mut().zip(r).zip(s) {
            *o += x * y;
        }
    }
    Ok(out)
}

/// Hidden signals `f^(0)..f^(T)` (one row per node or part) and the readout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forward {
    pub hidden: Vec<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout: Option<Vec<f64>>,
}

impl Forward {
    pub fn output(&self) -> &Matrix {
        self.hidden.last().expect("input signal is always present")
    }
}

fn concat(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().chain(b).copied().collect()
}

fn check_input(m: &MpnnSpec, d: usize) -> Result<()> {
    m.check()?;
    let want = m.input_dim().unwrap_or(d);
    if want != d {
        return Err(Error::Dimension(format!(
            "network takes {want} input channels, signal has {d}"
        )));
    }
    Ok(())
}

/// Application on a graph-signal:
/// `f_i' = mu(f_i, (1/n) sum_j a_ij phi(f_i, f_j))`, readout `psi(mean_j f_j)`.
pub fn apply_graph(m: &MpnnSpec, g: &GraphSignal) -> Result<Forward> {
    check_input(m, g.d())?;
    let n = g.n();
    let mut hidden = vec![g.features.clone()];
    for layer in &m.layers {
        let f = hidden.last().unwrap();
        let p = layer.message_dim();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let mut agg = vec![0.0; p];
            for j in 0..n {
                let a = g.adjacency.get(i, j);
                let phi = message(layer, f.row(i), f.row(j))?;
                for (s, v) in agg.iter_mut().zip(phi) {
                    *s += a * v;
                }
            }
            for s in agg.iter_mut() {
                *s /= n as f64;
            }
            rows.push(layer.update.eval(&concat(f.row(i), &agg)));
        }
        hidden.push(Matrix::from_rows(rows)?);
    }
    let readout = m.readout.as_ref().map(|psi| {
        let f = hidden.last().unwrap();
        let mean: Vec<f64> = (0..f.cols())
            .map(|c| (0..n).map(|i| f.get(i, c)).sum::<f64>() / n as f64)
            .collect();
        psi.eval(&mean)
    });
    Ok(Forward { hidden, readout })
}

/// Application on a step kernel-signal. Hidden signals stay constant on parts:
/// `f_i' = mu(f_i, sum_k rec_k(f_i) * sum_j mu_j W_ij trans_k(f_j))`, readout
/// `psi(sum_j mu_j f_j)`.
pub fn apply_step(m: &MpnnSpec, x: &StepKernelSignal) -> Result<Forward> {
    check_input(m, x.d())?;
    let n = x.n();
    let mu = x.masses();
    let mut hidden = vec![x.signal().clone()];
    for layer in &m.layers {
        let f = hidden.last().unwrap();
        let p = layer.message_dim();
        let mut agg = Matrix::zeros(n, p);
        for pair in &layer.messages {
            let trans: Vec<Vec<f64>> = (0..n).map(|j| pair.transmitter.eval(f.row(j))).collect();
            for i in 0..n {
                let rec = pair.receiver.eval(f.row(i));
                let mut integral = vec![0.0; p];
                for (j, t) in trans.iter().enumerate() {
                    let w = mu[j] * x.kernel().get(i, j);
                    for (s, v) in integral.iter_mut().zip(t) {
                        *s += w * v;
                    }
                }
                for (c, (r, s)) in rec.iter().zip(integral).enumerate() {
                    agg.set(i, c, agg.get(i, c) + r * s);
                }
            }
        }
        let rows = (0..n)
            .map(|i| layer.update.eval(&concat(f.row(i), agg.row(i))))
            .collect();
        hidden.push(Matrix::from_rows(rows)?);
    }
    let readout = m.readout.as_ref().map(|psi| {
        let f = hidden.last().unwrap();
        let integral: Vec<f64> = (0..f.cols())
            .map(|c| (0..n).map(|i| mu[i] * f.get(i, c)).sum())
            .collect();
        psi.eval(&integral)
    });
    Ok(Forward { hidden, readout })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutativityReport {
    /// Max deviation per layer `1..=T`.
    pub layer_deviations: Vec<f64>,
    pub readout_deviation: Option<f64>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `induce(apply_graph(m, g))` with `apply_step(m, induce(g))`
/// layer by layer and at the readout.
pub fn check_commutativity(m: &MpnnSpec, g: &GraphSignal, tol: f64) -> Result<CommutativityReport> {
    let v = g.validate();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let graph = apply_graph(m, g)?;
    let step = apply_step(m, &induce(g)?)?;
    let layer_deviations = graph.hidden[1..]
        .iter()
        .zip(&step.hidden[1..])
        .map(|(a, b)| a.max_abs_diff(b))
        .collect::<Result<Vec<_>>>()?;
    let readout_deviation = match (&graph.readout, &step.readout) {
        (Some(a), Some(b)) => Some(a.iter().zip(b).fold(0.0, |m, (x, y)| f64::max(m, (x - y).abs()))),
        _ => None,
    };
    let max_deviation = layer_deviations
        .iter()
        .copied()
        .chain(readout_deviation)
        .fold(0.0, f64::max);
    Ok(CommutativityReport {
        layer_deviations,
        readout_deviation,
        max_deviation,
        tol,
        pass: max_deviation <= tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzMeta {
    /// Largest certified Lipschitz constant of any constituent function.
    pub l: f64,
    /// Largest formal bias.
    pub b: f64,
    /// Largest number of message pairs in a layer.
    pub k: usize,
    pub t: usize,
    /// Largest feature or message width.
    pub d_max: usize,
    pub has_readout: bool,
}

pub fn lipschitz_metadata(m: &MpnnSpec) -> LipschitzMeta {
    let (d, p) = m.dims();
    LipschitzMeta {
        l: m.funcs().map(FuncSpec::lipschitz).fold(0.0, f64::max),
        b: m.funcs().map(FuncSpec::formal_bias).fold(0.0, f64::max),
        k: m.layers.iter().map(|l| l.messages.len()).max().unwrap_or(0),
        t: m.depth(),
        d_max: d.into_iter().chain(p).max().unwrap_or(0),
        has_readout: m.readout.is_some(),
    }
}
