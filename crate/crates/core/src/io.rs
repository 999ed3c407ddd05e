//! JSON and CSV file formats.
//!
//! Step kernel-signal:
//! `{"class": "graphon", "masses": [...], "kernel": [[...]], "signal": [[...]], "r": 1.0}`
//!
//! Graph-signal:
//! `{"directed": false, "range": "01", "adjacency": [[...]], "features": [[...]], "r": 1.0}`

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::signal::{GraphSignal, KernelClass, Partition, StepKernelSignal, Validate, WeightRange};

#[derive(Serialize, Deserialize)]
struct StepFile {
    class: KernelClass,
    masses: Vec<f64>,
    kernel: Matrix,
    signal: Matrix,
    r: f64,
}

impl Serialize for StepKernelSignal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StepFile {
            class: self.class(),
            masses: self.masses().to_vec(),
            kernel: self.kernel().clone(),
            signal: self.signal().clone(),
            r: self.radius(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StepKernelSignal {
    /// Deserialization does not validate; call [`Validate::validate`] or use
    /// [`read_step`].
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = StepFile::deserialize(d)?;
        Ok(StepKernelSignal::new_unchecked(
            Partition::from_masses_unchecked(f.masses),
            f.kernel,
            f.signal,
            f.class,
            f.r,
        ))
    }
}

pub fn step_from_json(s: &str) -> Result<StepKernelSignal> {
    let x: StepKernelSignal = serde_json::from_str(s)?;
    checked(x)
}

pub fn step_to_json(x: &StepKernelSignal) -> String {
    serde_json::to_string_pretty(x).expect("step kernel-signal serializes")
}

pub fn graph_from_json(s: &str) -> Result<GraphSignal> {
    let g: GraphSignal = serde_json::from_str(s)?;
    checked(g)
}

pub fn graph_to_json(g: &GraphSignal) -> String {
    serde_json::to_string_pretty(g).expect("graph-signal serializes")
}

pub fn read_step(path: impl AsRef<Path>) -> Result<StepKernelSignal> {
    step_from_json(&fs::read_to_string(path)?)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphSignal> {
    graph_from_json(&fs::read_to_string(path)?)
}

/// Either file kind, detected by its keys.
#[derive(Debug, Clone)]
pub enum Input {
    Step(StepKernelSignal),
    Graph(GraphSignal),
}

pub fn read_any(path: impl AsRef<Path>) -> Result<Input> {
    let text = fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    if v.get("adjacency").is_some() {
        Ok(Input::Graph(graph_from_json(&text)?))
    } else {
        Ok(Input::Step(step_from_json(&text)?))
    }
}

fn read_csv_matrix(path: &Path) -> Result<Matrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("{}: {s:?}: {e}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Matrix::from_rows(rows)
}

/// Imports a graph-signal from headerless `adjacency.csv` and `features.csv`.
pub fn graph_from_csv(
    adjacency: impl AsRef<Path>,
    features: impl AsRef<Path>,
    directed: bool,
    range: WeightRange,
    r: f64,
) -> Result<GraphSignal> {
    let a = read_csv_matrix(adjacency.as_ref())?;
    let f = read_csv_matrix(features.as_ref())?;
    GraphSignal::try_new(a, f, directed, range, r)
}

fn checked<T: Validate>(x: T) -> Result<T> {
    let v = x.validate();
    if v.is_empty() {
        Ok(x)
    } else {
        Err(Error::Invalid(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_round_trip_is_bit_exact() {
        let x = StepKernelSignal::try_new(
            Partition::new(vec![0.1, 0.2, 0.7]).unwrap(),
            Matrix::from_fn(3, 3, |i, j| ((i * 3 + j) as f64 / 9.0).sqrt() / 1.1 * if i == j { 1.0 } else { -1.0 }),
            Matrix::from_fn(3, 2, |i, c| (i as f64 + 0.1) / 3.0 - c as f64 * 0.7),
            KernelClass::GeneralKernel,
            2.0,
        )
        .unwrap();
        let back = step_from_json(&step_to_json(&x)).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn step_json_keys() {
        let x = StepKernelSignal::uniform(Matrix::identity(1), Matrix::zeros(1, 1), KernelClass::Graphon, 1.0)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&step_to_json(&x)).unwrap();
        for k in ["class", "masses", "kernel", "signal", "r"] {
            assert!(v.get(k).is_some(), "missing {k}");
        }
        assert_eq!(v["class"], "graphon");
    }

    #[test]
    fn graph_json_range_tags() {
        let s = r#"{"directed": true, "range": "pm1", "adjacency": [[0, -1], [0.5, 0]], "features": [[1], [0]], "r": 1}"#;
        let g = graph_from_json(s).unwrap();
        assert_eq!(g.weight_range, WeightRange::PlusMinusOne);
        assert_eq!(g.class(), KernelClass::GeneralKernel);
        let again = graph_from_json(&graph_to_json(&g)).unwrap();
        assert_eq!(again, g);
    }

    #[test]
    fn invalid_file_is_rejected() {
        let s = r#"{"class": "graphon", "masses": [1.0], "kernel": [[2.0]], "signal": [[0.0]], "r": 1.0}"#;
        assert!(matches!(step_from_json(s), Err(Error::Invalid(_))));
    }

    #[test]
    fn csv_import() {
        let dir = std::env::temp_dir().join(format!("graphon-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let a = dir.join("adjacency.csv");
        let f = dir.join("features.csv");
        std::fs::write(&a, "0,1\n1,0\n").unwrap();
        std::fs::write(&f, "1.5, -1\n0, 0.25\n").unwrap();
        let g = graph_from_csv(&a, &f, false, WeightRange::ZeroOne, 2.0).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.features.get(0, 1), -1.0);
        std::fs::remove_dir_all(&dir).ok();
    }
}
