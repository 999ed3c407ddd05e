use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use graphon_signal::alignment::{cut_distance, AlignMode, AlignParams};
use graphon_signal::bounds::{
    bhc_deviation, bhc_lambda, bhc_tail, certified_radius, covering_number_log2, generalization_bound,
    hidden_feature_bound, mpnn_lipschitz_constants, sampling_bounds, simplified_mpnn_bound, BoundReport,
    BoundValue, CoveringPreset, GeneralizationParams, HiddenCoeff, NetworkConstants,
};
use graphon_signal::io::{read_any, read_step, Input};
use graphon_signal::mpnn::{apply_graph, apply_step, check_commutativity, lipschitz_metadata, MpnnSpec};
use graphon_signal::norms::{cut_norm_kernel, signal_cut_norm, CutNormOptions, Method, DEFAULT_RESTARTS};
use graphon_signal::regularity::{best_step_approximation, weak_regularity_decompose, RegularityPreset};
use graphon_signal::sampling::{estimate_expected_distance, sample_batch, EstimateParams, LogBase, SampleMode};
use graphon_signal::signal::induce;
use graphon_signal::{Error, KernelClass, StepKernelSignal, Tolerances};
use graphon_lab::config::ExperimentConfig;
use graphon_lab::generate::{generate_instance, GenerateParams};
use graphon_lab::suites::{check_suite, run_and_write, SUITES};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "graphon-lab", version, about = "Cut norms, cut distance, regularity, sampling, MPNNs and bounds for step graphon-signals")]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Tolerance profile: default, strict or loose.
    #[arg(long, global = true)]
    tol_profile: Option<String>,
    /// Experiment config (TOML or JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cut norm of a step object's kernel (and of its signal).
    Cutnorm {
        file: PathBuf,
        #[arg(long, conflicts_with = "heuristic")]
        exact: bool,
        #[arg(long)]
        heuristic: bool,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Cut distance between two objects, minimized over part relabelings.
    Distance {
        a: PathBuf,
        b: PathBuf,
        /// exact, search or fixed.
        #[arg(long, default_value = "search")]
        mode: String,
        /// Cap on the common refinement.
        #[arg(long)]
        refine: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Greedy weak regularity decomposition.
    Regularize {
        file: PathBuf,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        exact: bool,
        /// Also report the best step approximation with at most this many parts.
        #[arg(long)]
        target: Option<usize>,
        #[arg(long, default_value_t = graphon_signal::regularity::DEFAULT_CEILING_C)]
        c: f64,
        #[arg(long, value_enum, default_value_t = Preset::Sharp)]
        preset: Preset,
    },
    /// Random sampling of graphs from a step object.
    Sample {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// weighted or simple.
        #[arg(long, default_value = "weighted")]
        mode: String,
        /// Estimate the expected cut distance instead of emitting graphs.
        #[arg(long)]
        estimate_distance: bool,
        #[arg(long, value_enum, default_value_t = Base::Two)]
        log_base: Base,
        /// Emit the per-trial distances as CSV.
        #[arg(long, requires = "estimate_distance")]
        csv: bool,
    },
    /// Message passing networks.
    Mpnn {
        #[command(subcommand)]
        cmd: MpnnCmd,
    },
    /// Bound calculators; parameters as a JSON file or inline JSON.
    Bounds {
        #[arg(value_enum)]
        kind: BoundKind,
        #[arg(long)]
        params: String,
        #[arg(long, value_enum, default_value_t = Coeff::Six)]
        hidden_coeff: Coeff,
        #[arg(long, value_enum, default_value_t = Preset::Sharp)]
        covering: Preset,
        #[arg(long, value_enum, default_value_t = Base::Two)]
        log_base: Base,
    },
    /// Run a verification suite (or `all`).
    Verify {
        suite: Option<String>,
        /// Output directory (default: the config's, then `results/<suite>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a seeded random instance.
    Generate {
        /// A kernel class name, `graph` or `mpnn`.
        kind: String,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long)]
        equal: bool,
        /// Kernel class of a generated graph.
        #[arg(long, default_value = "graphon")]
        class: String,
        #[arg(long = "T", default_value_t = 2)]
        t: usize,
        #[arg(long = "K", default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long)]
        readout: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum MpnnCmd {
    Run {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        check_commute: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundKind {
    Lipschitz,
    Hidden,
    Covering,
    Generalization,
    Sampling,
    Bhc,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Preset {
    Sharp,
    Conservative,
}

#[derive(Clone, Copy, ValueEnum)]
enum Coeff {
    #[value(name = "6")]
    Six,
    #[value(name = "4")]
    Four,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    #[value(name = "2")]
    Two,
    #[value(name = "e")]
    Natural,
}

impl From<Base> for LogBase {
    fn from(b: Base) -> Self {
        match b {
            Base::Two => LogBase::Two,
            Base::Natural => LogBase::Natural,
        }
    }
}

impl From<Coeff> for HiddenCoeff {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Six => HiddenCoeff::Six,
            Coeff::Four => HiddenCoeff::Four,
        }
    }
}

/// Outcome of a command that checks invariants.
enum Status {
    Ok,
    Violated,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Invalid(_)) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn print(v: &impl serde::Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn load_step(path: &Path) -> Result<StepKernelSignal> {
    Ok(match read_any(path)? {
        Input::Step(x) => x,
        Input::Graph(g) => induce(&g)?,
    })
}

struct Globals {
    seed: u64,
    tol: Tolerances,
    config: Option<ExperimentConfig>,
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .context("configuring the worker pool")?;
    }
    let config = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let profile = cli
        .tol_profile
        .clone()
        .or_else(|| config.as_ref().map(|c| c.tol_profile.clone()))
        .unwrap_or_else(|| "default".into());
    let tol = match config.as_ref().and_then(|c| c.tolerances) {
        Some(t) if cli.tol_profile.is_none() => t,
        _ => Tolerances::profile(&profile).with_context(|| format!("unknown tolerance profile {profile:?}"))?,
    };
    let g = Globals {
        seed: cli.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0),
        tol,
        config,
    };
    match cli.cmd {
        Cmd::Cutnorm { file, exact, heuristic, restarts } => {
            let x = load_step(&file)?;
            let opts = CutNormOptions {
                method: if exact {
                    Method::Exact
                } else if heuristic {
                    Method::Heuristic
                } else {
                    Method::Auto
                },
                restarts: restarts.unwrap_or(DEFAULT_RESTARTS),
                seed: g.seed,
                ..CutNormOptions::default()
            };
            let k = cut_norm_kernel(x.kernel(), x.masses(), &opts)?;
            let s = signal_cut_norm(x.signal(), x.masses(), &opts)?;
            let mut out = serde_json::to_value(&k)?;
            out["signal"] = serde_json::to_value(&s)?;
            print(&out)?;
        }
        Cmd::Distance { a, b, mode, refine, restarts } => {
            let mode = AlignMode::parse(&mode).with_context(|| format!("unknown mode {mode:?}"))?;
            let mut params = AlignParams {
                mode,
                seed: g.seed,
                ..AlignParams::default()
            };
            if mode == AlignMode::Exact {
                params.cut = CutNormOptions::exact();
            }
            params.cut.seed = g.seed;
            if let Some(r) = refine {
                params.refine_cap = r;
            }
            if let Some(r) = restarts {
                params.restarts = r;
            }
            print(&cut_distance(&load_step(&a)?, &load_step(&b)?, &params)?)?;
        }
        Cmd::Regularize { file, steps, exact, target, c, preset } => {
            let x = load_step(&file)?;
            let opts = if exact {
                CutNormOptions::exact()
            } else {
                CutNormOptions {
                    seed: g.seed,
                    ..CutNormOptions::default()
                }
            };
            let dec = weak_regularity_decompose(&x, steps, &opts)?;
            let mut out = json!({ "decomposition": dec });
            if let Some(n) = target {
                let preset = match preset {
                    Preset::Conservative => RegularityPreset::Conservative,
                    Preset::Sharp => RegularityPreset::Sharp,
                };
                out["approximation"] = serde_json::to_value(best_step_approximation(&x, n, &opts, c, preset)?)?;
            }
            print(&out)?;
        }
        Cmd::Sample { file, k, trials, mode, estimate_distance, log_base, csv } => {
            let x = read_step(&file)?;
            let mode = SampleMode::parse(&mode).with_context(|| format!("unknown mode {mode:?}"))?;
            if estimate_distance {
                let params = EstimateParams {
                    log_base: log_base.into(),
                    cut: CutNormOptions {
                        seed: g.seed,
                        ..CutNormOptions::default()
                    },
                };
                let e = estimate_expected_distance(&x, k, trials, mode, g.seed, &params)?;
                if csv {
                    println!("trial,distance");
                    for (t, d) in e.distances.iter().enumerate() {
                        println!("{t},{d}");
                    }
                } else {
                    print(&e)?;
                }
            } else {
                print(&sample_batch(&x, k, trials, mode, g.seed)?)?;
            }
        }
        Cmd::Mpnn { cmd: MpnnCmd::Run { spec, input, check_commute } } => {
            let text = std::fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let m: MpnnSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", spec.display()))?;
            let mut out = json!({ "lipschitz": lipschitz_metadata(&m), "certification": "sup norm" });
            let mut status = Status::Ok;
            match read_any(&input)? {
                Input::Graph(gr) => {
                    out["forward"] = serde_json::to_value(apply_graph(&m, &gr)?)?;
                    if check_commute {
                        let rep = check_commutativity(&m, &gr, g.tol.commute)?;
                        if !rep.pass {
                            status = Status::Violated;
                        }
                        out["commutativity"] = serde_json::to_value(rep)?;
                    }
                }
                Input::Step(x) => {
                    if check_commute {
                        bail!("--check-commute needs a graph input");
                    }
                    out["forward"] = serde_json::to_value(apply_step(&m, &x)?)?;
                }
            }
            print(&out)?;
            return Ok(status);
        }
        Cmd::Bounds { kind, params, hidden_coeff, covering, log_base } => {
            let raw = if Path::new(&params).exists() {
                std::fs::read_to_string(&params)?
            } else {
                params
            };
            let v: Value = serde_json::from_str(&raw).context("--params must be JSON or a JSON file")?;
            let covering = match covering {
                Preset::Conservative => CoveringPreset::Conservative,
                Preset::Sharp => CoveringPreset::Sharp,
            };
            print(&bound_report(kind, v, hidden_coeff.into(), covering, log_base.into())?)?;
        }
        Cmd::Verify { suite, out } => return verify(&g, suite, out),
        Cmd::Generate { kind, n, d, r, equal, class, t, k, width, readout, out } => {
            let p = GenerateParams {
                n,
                d,
                r,
                equal,
                class: KernelClass::parse(&class).with_context(|| format!("unknown class {class:?}"))?,
                t,
                k,
                width,
                readout,
            };
            let text = generate_instance(&kind, &p, g.seed)?;
            match out {
                Some(path) => std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{text}"),
            }
        }
    }
    Ok(Status::Ok)
}

fn verify(g: &Globals, suite: Option<String>, out: Option<PathBuf>) -> Result<Status> {
    let base = g.config.clone().unwrap_or_default();
    let name = suite.unwrap_or_else(|| base.suite.clone());
    if name.is_empty() {
        bail!("name a suite ({} or all) or give one in --config", SUITES.join(", "));
    }
    let names: Vec<String> = if name == "all" {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        check_suite(&name)?;
        vec![name]
    };
    let mut ok = true;
    for s in &names {
        let mut cfg = base.clone();
        cfg.suite = s.clone();
        cfg.seed = g.seed;
        cfg.tolerances = Some(g.tol);
        let dir = match (&out, names.len()) {
            (Some(o), 1) => o.clone(),
            (Some(o), _) => o.join(s),
            (None, _) => base.output.join(s),
        };
        let outcome = run_and_write(&cfg, &dir)?;
        for r in outcome.failures().take(10) {
            eprintln!("FAIL {} {} {}: {} > {}", r.suite, r.case, r.metric, r.value, r.bound);
        }
        println!(
            "{} {s}: {} rows, {} failed -> {}",
            if outcome.pass() { "PASS" } else { "FAIL" },
            outcome.rows.len(),
            outcome.failures().count(),
            dir.display()
        );
        ok &= outcome.pass();
    }
    Ok(if ok { Status::Ok } else { Status::Violated })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LipschitzParams {
    #[serde(rename = "K")]
    k: Option<f64>,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "B")]
    b: Option<f64>,
    #[serde(rename = "T")]
    t: Option<usize>,
    d: Option<f64>,
    r: f64,
    /// Take K, L, B, T and d from a network file instead.
    spec: Option<PathBuf>,
    #[serde(default)]
    nonneg: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HiddenParams {
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "B")]
    b: f64,
    r: f64,
    t: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CoveringParams {
    eps: f64,
    c: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GenParams {
    #[serde(rename = "N")]
    n: f64,
    p: f64,
    #[serde(rename = "L_E", default = "one")]
    l_e: f64,
    #[serde(rename = "L_H")]
    l_h: f64,
    #[serde(rename = "B_H")]
    b_h: f64,
    #[serde(rename = "E00", default)]
    e00: f64,
    c: f64,
    #[serde(default = "one")]
    window: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SamplingParams {
    k: f64,
    #[serde(default = "one")]
    r: f64,
    #[serde(rename = "L")]
    l: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BhcParams {
    #[serde(rename = "J")]
    j: usize,
    #[serde(rename = "N")]
    n: usize,
    p: f64,
    lambda: Option<f64>,
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).context("invalid bound parameters")
}

fn bound_report(
    kind: BoundKind,
    v: Value,
    coeff: HiddenCoeff,
    covering: CoveringPreset,
    base: LogBase,
) -> Result<BoundReport> {
    Ok(match kind {
        BoundKind::Lipschitz => {
            let p: LipschitzParams = parse(&v)?;
            let net = match &p.spec {
                Some(path) => {
                    let m: MpnnSpec = serde_json::from_str(&std::fs::read_to_string(path)?)?;
                    m.check()?;
                    NetworkConstants::certified(&lipschitz_metadata(&m))
                }
                None => NetworkConstants {
                    k: p.k.context("K is required without spec")?,
                    l: p.l.context("L is required without spec")?,
                    b: p.b.context("B is required without spec")?,
                    t: p.t.context("T is required without spec")?,
                    d: p.d.context("d is required without spec")?,
                },
            };
            let r = if p.spec.is_some() { certified_radius(p.r) } else { p.r };
            let c = mpnn_lipschitz_constants(&net, r, coeff);
            let (s, k) = simplified_mpnn_bound(p.r, p.nonneg);
            let mut rep = BoundReport::new(
                &format!("mpnn lipschitz constants (hidden coefficient {})", coeff.value()),
                json!({ "K": net.k, "L": net.l, "B": net.b, "T": net.t, "d": net.d, "r": r }),
            )
            .with("L_Ht", c.l_ht)
            .with("L_H", c.l_h)
            .with("B_H", c.b_h)
            .with("no_message_signal", BoundValue::linear(s))
            .with("no_message_kernel", BoundValue::linear(k));
            for layer in &c.layers {
                rep = rep
                    .with(&format!("signal_t{}", layer.t), layer.signal)
                    .with(&format!("kernel_t{}", layer.t), layer.kernel);
            }
            rep.flagged(&c.flags)
                .flagged(&["Lipschitz constants and formal biases are certified in the sup norm".to_string()])
        }
        BoundKind::Hidden => {
            let p: HiddenParams = parse(&v)?;
            let h = hidden_feature_bound(p.k, p.l, p.b, p.r, p.t, coeff);
            BoundReport::new(&format!("hidden feature bound (coefficient {})", coeff.value()), v)
                .with("hidden", h.bound)
                .flagged(&h.flags)
        }
        BoundKind::Covering => {
            let p: CoveringParams = parse(&v)?;
            let c = covering_number_log2(p.eps, p.c, covering)?;
            let mut rep = BoundReport::new(&format!("covering number (exponent coefficient {})", covering.coeff()), v);
            rep.bounds.insert("log2_kappa".into(), BoundValue { log2: c.log2_log2_kappa, value: c.log2_kappa.is_finite().then_some(c.log2_kappa) });
            if let Some(k) = c.k {
                rep = rep.with("k", BoundValue::linear(k));
            }
            if !c.exact_ceiling {
                rep.flags.push("ceiling dropped: k evaluated analytically".into());
            }
            rep
        }
        BoundKind::Generalization => {
            let p: GenParams = parse(&v)?;
            let g = generalization_bound(&GeneralizationParams {
                n: p.n,
                p: p.p,
                l_e: p.l_e,
                l_h: p.l_h,
                b_h: p.b_h,
                e00: p.e00,
                c: p.c,
                preset: covering,
                window: p.window,
            })?;
            let mut rep = BoundReport::new(&format!("generalization bound (covering coefficient {})", covering.coeff()), v)
                .with("xi_inverse", BoundValue::linear(g.xi_inverse.r))
                .with("bound", BoundValue::linear(g.value))
                .with("loss_lipschitz", BoundValue::linear(g.loss_lipschitz))
                .with("loss_bound", BoundValue::linear(g.loss_bound))
                .with("loss_level_bound", BoundValue::linear(g.loss_value));
            rep.flags.push(format!(
                "xi inverse: relative error {:.1e}, ceiling step error {:.1e}",
                g.xi_inverse.rel_error, g.xi_inverse.ceiling_error
            ));
            if !g.xi_inverse.in_window {
                rep.flags.push(format!("radius {} lies outside the small-radius window {}", g.xi_inverse.r, g.xi_inverse.window));
            }
            rep
        }
        BoundKind::Sampling => {
            let p: SamplingParams = parse(&v)?;
            let s = sampling_bounds(p.k, p.r, p.l, base)?;
            let mut rep = BoundReport::new("sampling bounds", v)
                .with("cut_distance", BoundValue::linear(s.cut_distance))
                .with("quarter_root", BoundValue::linear(s.quarter_root))
                .with("simple_graph", BoundValue::linear(s.simple_graph))
                .with("signal", BoundValue::linear(s.signal));
            if let Some(m) = s.mpnn {
                rep = rep.with("mpnn", BoundValue::linear(m));
            }
            rep
        }
        BoundKind::Bhc => {
            let p: BhcParams = parse(&v)?;
            let lambda = p.lambda.unwrap_or_else(|| bhc_lambda(p.j, p.p));
            BoundReport::new("multinomial concentration", v)
                .with("lambda", BoundValue::linear(lambda))
                .with("tail", BoundValue::linear(bhc_tail(p.j, lambda)))
                .with("deviation", BoundValue::linear(bhc_deviation(p.j, p.n, p.p)))
        }
    })
}
