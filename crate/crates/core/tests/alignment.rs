use graphon_signal::alignment::{cut_distance, permute, AlignMode, AlignParams};
use graphon_signal::norms::{cut_metric, CutNormOptions};
use graphon_signal::random::{self, ALL_CLASSES};
use graphon_signal::rng;
use graphon_signal::signal::induce;
use graphon_signal::StepKernelSignal;

fn third(a: &StepKernelSignal, seed: u64) -> StepKernelSignal {
    let mut g = rng::stream(seed, 3);
    StepKernelSignal::new_unchecked(
        a.partition().clone(),
        random::kernel(a.n(), a.class(), &mut g),
        random::signal(a.n(), a.d(), a.radius(), &mut g),
        a.class(),
        a.radius(),
    )
}

#[test]
fn distance_never_exceeds_the_unaligned_metric() {
    for seed in 0..60 {
        let n = 1 + seed as usize % 5;
        let (a, b) = random::step_pair(n, 2, ALL_CLASSES[seed as usize % 4], 1.0, true, seed);
        let d = cut_metric(&a, &b, &CutNormOptions::exact()).unwrap().value;
        let delta = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        assert!(delta.exact);
        assert!(delta.distance <= d + 1e-12, "seed {seed}");
    }
}

#[test]
fn exact_distance_is_a_pseudometric_on_small_instances() {
    let p = AlignParams::exact();
    for seed in 0..100 {
        let n = 1 + seed as usize % 4;
        let class = ALL_CLASSES[seed as usize % 4];
        let (a, b) = random::step_pair(n, 1 + seed as usize % 2, class, 1.0, true, seed);
        let c = third(&a, seed);
        let ab = cut_distance(&a, &b, &p).unwrap().distance;
        let ba = cut_distance(&b, &a, &p).unwrap().distance;
        let bc = cut_distance(&b, &c, &p).unwrap().distance;
        let ac = cut_distance(&a, &c, &p).unwrap().distance;
        assert!((ab - ba).abs() <= 1e-12, "seed {seed}: {ab} vs {ba}");
        assert!(ac <= ab + bc + 1e-9, "seed {seed}");
        assert!(cut_distance(&a, &a, &p).unwrap().distance <= 1e-12);
    }
}

#[test]
fn local_search_is_an_upper_bound_with_monotone_trace() {
    for seed in 0..40 {
        let n = 3 + seed as usize % 4;
        let (a, b) = random::step_pair(n, 1, ALL_CLASSES[seed as usize % 4], 1.0, true, seed);
        let ex = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        let search = AlignParams {
            mode: AlignMode::LocalSearch,
            restarts: 6,
            seed,
            ..AlignParams::exact()
        };
        let ls = cut_distance(&a, &b, &search).unwrap();
        assert!(!ls.exact);
        assert!(ls.distance >= ex.distance - 1e-12, "seed {seed}");
        assert_eq!(ls.restart_trace.len(), 6);
        assert!(ls.restart_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(*ls.restart_trace.last().unwrap(), ls.distance);
    }
}

#[test]
fn relabeled_graphs_are_at_distance_zero() {
    for seed in 0..30 {
        let n = 2 + seed as usize % 6;
        let g = random::graph(n, 2, ALL_CLASSES[seed as usize % 4], 1.0, seed);
        let p = random::permutation(n, &mut rng::rng(seed));
        let a = induce(&g).unwrap();
        let b = induce(&g.relabel(&p)).unwrap();
        let d = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        assert!(d.distance <= 1e-12, "seed {seed}: {}", d.distance);
        let back = permute(&b, &d.permutation).unwrap();
        assert!(cut_metric(&a, &back, &CutNormOptions::exact()).unwrap().value <= 1e-12);
    }
}

#[test]
fn unequal_partitions_are_aligned_by_overlay() {
    for seed in 0..20 {
        let a = random::step(3, 1, ALL_CLASSES[seed as usize % 4], 1.0, false, seed);
        let b = random::step(2, 1, ALL_CLASSES[seed as usize % 4], 1.0, false, seed + 100);
        let ab = cut_distance(&a, &b, &AlignParams::exact()).unwrap();
        let ba = cut_distance(&b, &a, &AlignParams::exact()).unwrap();
        assert!(ab.distance >= 0.0 && ba.distance >= 0.0);
        assert!(cut_distance(&a, &a, &AlignParams::exact()).unwrap().distance <= 1e-12);
    }
}
