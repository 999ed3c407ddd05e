//! Seeded instance files for the CLI and the suites.

use anyhow::{bail, Context, Result};
use graphon_signal::io::{graph_to_json, step_to_json};
use graphon_signal::mpnn::MpnnSpec;
use graphon_signal::random::{self, MpnnShape};
use graphon_signal::rng;
use graphon_signal::KernelClass;
use rand::Rng;

/// Random network with input width `d`, `depth` layers, widths and pair counts
/// in `1..=3`, and small weights.
pub fn network(seed: u64, d: usize, depth: usize, readout: bool) -> MpnnSpec {
    let mut g = rng::stream(seed, 11);
    let mut dims = vec![d];
    dims.extend((0..depth).map(|_| g.gen_range(1..=3)));
    let mut shape = MpnnShape::new(dims, g.gen_range(1..=3), g.gen_range(1..=2));
    shape.readout = readout.then(|| g.gen_range(1..=2));
    random::mpnn(&shape, seed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateParams {
    pub n: usize,
    pub d: usize,
    pub r: f64,
    /// Equal part masses.
    pub equal: bool,
    /// Kernel class of a generated graph.
    pub class: KernelClass,
    /// Layers of a generated network.
    pub t: usize,
    /// Message pairs per layer.
    pub k: usize,
    pub width: usize,
    pub readout: Option<usize>,
}

impl Default for GenerateParams {
    fn default() -> Self {
        Self {
            n: 4,
            d: 2,
            r: 1.0,
            equal: false,
            class: KernelClass::Graphon,
            t: 2,
            k: 2,
            width: 2,
            readout: None,
        }
    }
}

/// JSON text of a generated instance. `kind` is a kernel class name (step
/// object), `graph` or `mpnn`.
pub fn generate_instance(kind: &str, p: &GenerateParams, seed: u64) -> Result<String> {
    if p.n == 0 || p.d == 0 || !(p.r > 0.0) {
        bail!("need n >= 1, d >= 1 and r > 0");
    }
    match kind {
        "graph" => Ok(graph_to_json(&random::graph(p.n, p.d, p.class, p.r, seed))),
        "mpnn" => {
            if p.t == 0 || p.k == 0 || p.width == 0 {
                bail!("an MPNN needs T >= 1, K >= 1 and a positive width");
            }
            let mut dims = vec![p.d];
            dims.extend(std::iter::repeat(p.width).take(p.t));
            let mut shape = MpnnShape::new(dims, p.width, p.k);
            shape.readout = p.readout;
            Ok(serde_json::to_string_pretty(&random::mpnn(&shape, seed))?)
        }
        other => {
            let class = KernelClass::parse(other)
                .with_context(|| format!("unknown kind {other:?}; use a kernel class, graph or mpnn"))?;
            Ok(step_to_json(&random::step(p.n, p.d, class, p.r, p.equal, seed)))
        }
    }
}
