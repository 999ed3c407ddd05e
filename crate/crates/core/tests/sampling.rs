use graphon_signal::norms::CutNormOptions;
use graphon_signal::random::{self, ALL_CLASSES};
use graphon_signal::sampling::{
    estimate_expected_distance, sample_batch, sample_points, sample_simple, sample_weighted,
    signal_l1_deviation, EstimateParams, LogBase, SampleMode, SamplePoint,
};
use graphon_signal::signal::induce;
use graphon_signal::{KernelClass, Matrix, StepKernelSignal};

fn constant_graphon(p: f64, class: KernelClass) -> StepKernelSignal {
    StepKernelSignal::uniform(Matrix::filled(1, 1, p), Matrix::filled(1, 1, 0.5), class, 1.0).unwrap()
}

/// Empirical rate and its standard error over the off-diagonal entries.
fn edge_rate(x: &StepKernelSignal, k: usize, graphs: usize, upper_only: bool) -> (f64, f64) {
    let (mut ones, mut total) = (0usize, 0usize);
    for s in 0..graphs as u64 {
        let g = sample_simple(x, &sample_points(x.partition(), k, s), 1000 + s).unwrap();
        for i in 0..k {
            assert_eq!(g.adjacency.get(i, i), 0.0);
            for j in 0..k {
                if i != j && (!upper_only || i < j) {
                    total += 1;
                    ones += g.adjacency.get(i, j) as usize;
                }
            }
        }
    }
    let rate = ones as f64 / total as f64;
    (rate, (rate * (1.0 - rate) / total as f64).sqrt())
}

#[test]
fn simple_graph_marginals_match_edge_probabilities() {
    let (rate, se) = edge_rate(&constant_graphon(0.5, KernelClass::DirectedGraphon), 101, 1, false);
    assert!((rate - 0.5).abs() <= 4.0 * se, "directed rate {rate}");
    // undirected graphs take max(A, A^T) of a directed draw
    let (rate, se) = edge_rate(&constant_graphon(0.5, KernelClass::Graphon), 101, 2, true);
    assert!((rate - 0.75).abs() <= 4.0 * se, "undirected rate {rate}");
    let (rate, se) = edge_rate(&constant_graphon(0.2, KernelClass::DirectedGraphon), 101, 1, false);
    assert!((rate - 0.2).abs() <= 4.0 * se, "rate {rate}");
}

#[test]
fn simple_sampling_is_only_defined_for_graphons() {
    let x = random::step(3, 1, KernelClass::SymmetricKernel, 1.0, true, 0);
    assert!(sample_simple(&x, &sample_points(x.partition(), 5, 0), 0).is_err());
}

#[test]
fn weighted_sampling_on_the_part_grid_recovers_the_object() {
    for seed in 0..20 {
        let n = 1 + seed as usize % 6;
        let x = random::step(n, 2, ALL_CLASSES[seed as usize % 4], 1.0, true, seed);
        let grid: Vec<SamplePoint> = (0..n).map(|part| SamplePoint { part, offset: 0.5 }).collect();
        let y = induce(&sample_weighted(&x, &grid)).unwrap();
        assert_eq!(y.kernel(), x.kernel());
        assert_eq!(y.signal(), x.signal());
        let z = induce(&sample_weighted(&y, &grid)).unwrap();
        assert_eq!(z, y);
    }
}

#[test]
fn batches_are_reproducible_per_trial() {
    let x = random::step(3, 1, KernelClass::Graphon, 1.0, false, 4);
    let a = sample_batch(&x, 20, 4, SampleMode::Simple, 9).unwrap();
    let b = sample_batch(&x, 20, 4, SampleMode::Simple, 9).unwrap();
    assert_eq!(a, b);
    let single = sample_batch(&x, 20, 1, SampleMode::Simple, 9 ^ 2).unwrap();
    assert_eq!(single.graphs[0], a.graphs[2]);
}

#[test]
fn signal_norm_concentrates_at_the_inverse_root_rate() {
    for seed in 0..10 {
        for d in [1, 2] {
            let x = random::step(5, d, KernelClass::Graphon, 1.0, false, seed);
            for k in [16, 64, 256] {
                let dev = signal_l1_deviation(&x, k, 200, seed).unwrap();
                let bound = x.radius() / (k as f64).sqrt();
                assert!(dev <= bound * 1.25, "seed {seed} d {d} k {k}: {dev} > {bound}");
            }
        }
    }
}

#[test]
fn expected_distance_is_below_the_sampling_bound() {
    let x = StepKernelSignal::uniform(
        Matrix::from_rows(vec![vec![0.8, 0.2], vec![0.2, 0.6]]).unwrap(),
        Matrix::from_rows(vec![vec![1.0], vec![-1.0]]).unwrap(),
        KernelClass::Graphon,
        1.0,
    )
    .unwrap();
    let params = EstimateParams {
        log_base: LogBase::Two,
        cut: CutNormOptions::exact(),
    };
    let mut means = Vec::new();
    for k in [16, 64] {
        let e = estimate_expected_distance(&x, k, 10, SampleMode::Weighted, 1, &params).unwrap();
        assert!(e.exact);
        assert!(e.mean < e.bound);
        means.push(e.mean);
    }
    assert!(means[1] < means[0]);
}
