//! Closed-form bound calculators. Quantities that overflow `f64` are carried
//! as base-2 logarithms.

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mpnn::LipschitzMeta;
use crate::rng;
use crate::sampling::LogBase;

/// A nonnegative number stored as its base-2 logarithm (`-inf` is zero).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Log2(pub f64);

impl Log2 {
    pub const ZERO: Log2 = Log2(f64::NEG_INFINITY);
    pub const ONE: Log2 = Log2(0.0);

    pub fn of(v: f64) -> Self {
        assert!(v >= 0.0, "Log2::of needs a nonnegative value, got {v}");
        Log2(v.log2())
    }

    pub fn value(self) -> f64 {
        self.0.exp2()
    }

    pub fn mul(self, o: Log2) -> Log2 {
        Log2(self.0 + o.0)
    }

    pub fn powi(self, e: f64) -> Log2 {
        Log2(self.0 * e)
    }

    pub fn add(self, o: Log2) -> Log2 {
        let (hi, lo) = if self.0 >= o.0 { (self.0, o.0) } else { (o.0, self.0) };
        if hi == f64::NEG_INFINITY {
            return Log2::ZERO;
        }
        Log2(hi + (lo - hi).exp2().ln_1p() / LN_2)
    }

    pub fn max(self, o: Log2) -> Log2 {
        if self.0 >= o.0 {
            self
        } else {
            o
        }
    }
}

/// A bound in both representations; `value` is absent when it overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub log2: f64,
    pub value: Option<f64>,
}

impl From<Log2> for BoundValue {
    fn from(l: Log2) -> Self {
        let v = l.value();
        Self {
            log2: l.0,
            value: v.is_finite().then_some(v),
        }
    }
}

impl BoundValue {
    pub fn linear(v: f64) -> Self {
        Log2::of(v).into()
    }
}

/// Named bounds together with the parameters that produced them and any
/// hypothesis violations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: String,
    pub params: serde_json::Value,
    pub bounds: BTreeMap<String, BoundValue>,
    pub flags: Vec<String>,
}

impl BoundReport {
    pub fn new(kind: &str, params: serde_json::Value) -> Self {
        Self {
            kind: kind.to_string(),
            params,
            bounds: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, v: impl Into<BoundValue>) -> Self {
        self.bounds.insert(name.to_string(), v.into());
        self
    }

    pub fn flagged(mut self, flags: &[String]) -> Self {
        self.flags.extend_from_slice(flags);
        self
    }
}

/// Iterates `e_{t+1} = a_t e_t + b_t`; returns `e_0..=e_T` with `T = a.len()`.
pub fn recurrence(a: &[f64], b: &[f64], e0: f64) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("{} coefficients a, {} coefficients b", a.len(), b.len())));
    }
    let mut e = vec![e0];
    for (ai, bi) in a.iter().zip(b) {
        let last = *e.last().unwrap();
        e.push(ai * last + bi);
    }
    Ok(e)
}

/// Closed form `e_t = prod_{j<t} a_j e_0 + sum_{j=1}^{t} prod_{i=1}^{j-1} a_{t-i} b_{t-j}`.
pub fn recurrence_closed(a: &[f64], b: &[f64], e0: f64, t: usize) -> f64 {
    let head: f64 = a[..t].iter().product::<f64>() * e0;
    let tail: f64 = (1..=t)
        .map(|j| (1..j).map(|i| a[t - i]).product::<f64>() * b[t - j])
        .sum();
    head + tail
}

/// Constant coefficients: `a^t e_0 + sum_{j<t} a^j b`.
pub fn recurrence_constant(a: f64, b: f64, e0: f64, t: usize) -> f64 {
    a.powi(t as i32) * e0 + (0..t).map(|j| a.powi(j as i32) * b).sum::<f64>()
}

/// Leading constant `c` in the per-layer growth `c K L^3 B^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenCoeff {
    /// The constant the stated inequality certifies.
    Six,
    /// The constant at the end of the derivation.
    Four,
}

impl HiddenCoeff {
    pub fn value(self) -> f64 {
        match self {
            Self::Six => 6.0,
            Self::Four => 4.0,
        }
    }
}

fn hypothesis_flags(k: f64, l: f64, b: f64, r: f64) -> Vec<String> {
    let mut f = Vec::new();
    for (name, v) in [("K", k), ("L", l), ("B", b)] {
        if !(v > 1.0) {
            f.push(format!("hypothesis {name} > 1 fails ({name} = {v})"));
        }
    }
    if !(r >= 1.0) {
        f.push(format!("bound assumes r >= 1 (r = {r})"));
    }
    f
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenBound {
    pub bound: BoundValue,
    pub flags: Vec<String>,
}

/// `(c K L^3 B^2)^(2^t) r^(2^t)`, evaluated as `2^t (log2(c K L^3 B^2) + log2 r)`.
pub fn hidden_feature_bound(k: f64, l: f64, b: f64, r: f64, t: usize, coeff: HiddenCoeff) -> HiddenBound {
    let base = Log2::of(coeff.value() * k * l.powi(3) * b * b).mul(Log2::of(r));
    HiddenBound {
        bound: base.powi((t as f64).exp2()).into(),
        flags: hypothesis_flags(k, l, b, r),
    }
}

fn hidden_log2(k: f64, l: f64, b: f64, r: f64, t: usize, coeff: HiddenCoeff) -> Log2 {
    if t == 0 {
        return Log2::of(r);
    }
    Log2(hidden_feature_bound(k, l, b, r, t, coeff).bound.log2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConstants {
    pub k: f64,
    pub l: f64,
    pub b: f64,
    pub t: usize,
    pub d: f64,
}

/// Nudge applied when a measured constant sits at or below 1.
const ABOVE_ONE: f64 = 1.0 + 1e-9;

impl NetworkConstants {
    /// Constants meeting the strict hypotheses `K, L, B > 1` for a concrete
    /// network: measured values are raised to just above 1 where needed. Every
    /// bound here is nondecreasing in each constant, so this stays valid.
    /// `d` is the largest feature or message width.
    pub fn certified(meta: &LipschitzMeta) -> Self {
        let lift = |v: f64| v.max(1.0) * ABOVE_ONE;
        Self {
            k: lift(meta.k as f64),
            l: lift(meta.l),
            b: lift(meta.b),
            t: meta.t,
            d: meta.d_max as f64,
        }
    }
}

/// Input radius used with [`NetworkConstants::certified`]: `max(r, 1)`.
pub fn certified_radius(r: f64) -> f64 {
    r.max(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerConstants {
    pub t: usize,
    pub signal: BoundValue,
    pub kernel: BoundValue,
    pub combined: BoundValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzConstants {
    /// `t = 0..=T`.
    pub layers: Vec<LayerConstants>,
    /// `L_Ht` at `t = T`.
    pub l_ht: BoundValue,
    /// Readout network: `L * L_HT`.
    pub l_h: BoundValue,
    /// `L * r_T + B`.
    pub b_h: BoundValue,
    pub flags: Vec<String>,
}

/// Per-layer Lipschitz coefficients of a `T`-layer network. With
/// `r_j` the hidden-feature bound at layer `j`,
/// `a_j = 4 K d (L^3 r_j + L^2 B) + L` and `b_j = 4 K (L^2 r_j + L B)^2`; the
/// signal coefficient at `t` is `prod_{j<t} a_j` and the kernel coefficient is
/// `sum_{j=1}^{t} prod_{i=1}^{j-1} a_{t-i} b_{t-j}`.
pub fn mpnn_lipschitz_constants(net: &NetworkConstants, r: f64, coeff: HiddenCoeff) -> LipschitzConstants {
    let NetworkConstants { k, l, b, t, d } = *net;
    let rs: Vec<Log2> = (0..=t).map(|j| hidden_log2(k, l, b, r, j, coeff)).collect();
    let (lk, ll, lb, ld) = (Log2::of(k), Log2::of(l), Log2::of(b), Log2::of(d));
    let four = Log2::of(4.0);
    let a: Vec<Log2> = rs
        .iter()
        .map(|&rj| {
            let inner = ll.powi(3.0).mul(rj).add(ll.powi(2.0).mul(lb));
            four.mul(lk).mul(ld).mul(inner).add(ll)
        })
        .collect();
    let bb: Vec<Log2> = rs
        .iter()
        .map(|&rj| four.mul(lk).mul(ll.powi(2.0).mul(rj).add(ll.mul(lb)).powi(2.0)))
        .collect();
    let layers: Vec<LayerConstants> = (0..=t)
        .map(|s| {
            let signal = a[..s].iter().fold(Log2::ONE, |acc, &x| acc.mul(x));
            let kernel = (1..=s).fold(Log2::ZERO, |acc, j| {
                let prod = (1..j).fold(Log2::ONE, |p, i| p.mul(a[s - i]));
                acc.add(prod.mul(bb[s - j]))
            });
            LayerConstants {
                t: s,
                signal: signal.into(),
                kernel: kernel.into(),
                combined: signal.max(kernel).into(),
            }
        })
        .collect();
    let l_ht = Log2(layers[t].combined.log2);
    LipschitzConstants {
        l_ht: l_ht.into(),
        l_h: ll.mul(l_ht).into(),
        b_h: ll.mul(rs[t]).add(lb).into(),
        layers,
        flags: hypothesis_flags(k, l, b, r),
    }
}

/// Coefficients `(signal, kernel)` for networks without message functions:
/// `(1, 2r)`, or `(1, r)` for nonnegative signals.
pub fn simplified_mpnn_bound(r: f64, nonneg: bool) -> (f64, f64) {
    (1.0, if nonneg { r } else { 2.0 * r })
}

/// Exponent coefficient of the covering number `k = ceil(2^(coeff c / eps^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoveringPreset {
    /// Coefficient 2.
    Sharp,
    /// Coefficient 9/4.
    Conservative,
}

impl CoveringPreset {
    pub fn coeff(self) -> f64 {
        match self {
            Self::Sharp => 2.0,
            Self::Conservative => 2.25,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "2" | "sharp" => Some(Self::Sharp),
            "9/4" | "2.25" | "conservative" => Some(Self::Conservative),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Covering {
    /// `k`, when it fits in an `f64` integer.
    pub k: Option<f64>,
    /// `log2 kappa = k^2` (infinite when it overflows).
    pub log2_kappa: f64,
    pub log2_log2_kappa: f64,
    /// True when the ceiling was applied exactly.
    pub exact_ceiling: bool,
}

/// `log2 kappa(eps) = k^2` with `k = ceil(2^(coeff c / eps^2))`.
pub fn covering_number_log2(eps: f64, c: f64, preset: CoveringPreset) -> Result<Covering> {
    if !(eps > 0.0) || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0 and c > 0, got eps = {eps}, c = {c}")));
    }
    let x = preset.coeff() * c / (eps * eps);
    if x < 52.0 {
        let k = x.exp2().ceil();
        let sq = k * k;
        Ok(Covering {
            k: Some(k),
            log2_kappa: sq,
            log2_log2_kappa: sq.log2(),
            exact_ceiling: true,
        })
    } else {
        let two_x = 2.0 * x;
        Ok(Covering {
            k: (x < 1024.0).then(|| x.exp2()),
            log2_kappa: two_x.exp2(),
            log2_log2_kappa: two_x,
            exact_ceiling: false,
        })
    }
}

/// `ln xi(r)` with `xi(r) = ln(kappa(r)) / r^2 = k^2 ln 2 / r^2` and the
/// ceiling in `k` dropped, so that `xi` is strictly decreasing.
pub fn ln_xi(r: f64, c: f64, preset: CoveringPreset) -> f64 {
    let x = preset.coeff() * c / (r * r);
    LN_2.ln() + 2.0 * x * LN_2 - 2.0 * r.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiInverse {
    pub r: f64,
    /// `|xi(r) - N| / N`.
    pub rel_error: f64,
    /// Relative change of `xi(r)` if the ceiling in `k` were restored.
    pub ceiling_error: f64,
    pub in_window: bool,
    pub window: f64,
}

pub const XI_TOLERANCE: f64 = 1e-6;

/// Solves `xi(r) = N` by bisection on `ln r`.
pub fn xi_inverse(n: f64, c: f64, preset: CoveringPreset, window: f64) -> Result<XiInverse> {
    if !(n >= 1.0) || !n.is_finite() {
        return Err(Error::InvalidArgument(format!("N must be a finite number >= 1, got {n}")));
    }
    let target = n.ln();
    let f = |lr: f64| ln_xi(lr.exp(), c, preset) - target;
    let (mut lo, mut hi) = (0.0_f64, 0.0_f64);
    let mut tries = 0;
    while f(lo) <= 0.0 {
        lo -= 1.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::InvalidArgument(format!("cannot bracket the inverse at N = {n}")));
        }
    }
    while f(hi) >= 0.0 {
        hi += 1.0;
        tries += 1;
        if tries > 400 {
            return Err(Error::InvalidArgument(format!("cannot bracket the inverse at N = {n}")));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let lr = 0.5 * (lo + hi);
    let r = lr.exp();
    let rel_error = f(lr).exp_m1().abs();
    let x = preset.coeff() * c / (r * r);
    // ceil(2^x) < 2^x + 1, so xi grows by less than a factor (1 + 2^-x)^2
    let ceiling_error = 2.0 * (-x).exp2().ln_1p();
    let ceiling_error = ceiling_error.exp_m1();
    if rel_error > XI_TOLERANCE {
        return Err(Error::InvalidArgument(format!("inverse did not converge at N = {n}")));
    }
    Ok(XiInverse {
        r,
        rel_error,
        ceiling_error,
        in_window: r <= window,
        window,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationParams {
    pub n: f64,
    pub p: f64,
    pub l_e: f64,
    pub l_h: f64,
    pub b_h: f64,
    pub e00: f64,
    pub c: f64,
    pub preset: CoveringPreset,
    /// Largest radius regarded as "small" for the covering estimate.
    pub window: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Generalization {
    pub xi_inverse: XiInverse,
    /// `xi^-1(N) (2 L_H + sqrt 2 B_H sqrt((ln 2 + 2 ln(1/p)) / N))`.
    pub value: f64,
    /// `L_E max(L_H, 1)`.
    pub loss_lipschitz: f64,
    /// `L_E (B_H + 1) + |E(0, 0)|`.
    pub loss_bound: f64,
    /// The same display evaluated with the loss-level constants.
    pub loss_value: f64,
}

fn generalization_display(r: f64, l: f64, b: f64, n: f64, p: f64) -> f64 {
    r * (2.0 * l + 2f64.sqrt() * b * ((LN_2 + 2.0 * (1.0 / p).ln()) / n).sqrt())
}

pub fn generalization_bound(g: &GeneralizationParams) -> Result<Generalization> {
    if !(g.p > 0.0 && g.p <= 1.0) {
        return Err(Error::InvalidArgument(format!("p must lie in (0, 1], got {}", g.p)));
    }
    let xi = xi_inverse(g.n, g.c, g.preset, g.window)?;
    let loss_lipschitz = g.l_e * g.l_h.max(1.0);
    let loss_bound = g.l_e * (g.b_h + 1.0) + g.e00.abs();
    Ok(Generalization {
        xi_inverse: xi,
        value: generalization_display(xi.r, g.l_h, g.b_h, g.n, g.p),
        loss_lipschitz,
        loss_bound,
        loss_value: generalization_display(xi.r, loss_lipschitz, loss_bound, g.n, g.p),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingBounds {
    /// `15 / sqrt(log k)`.
    pub cut_distance: f64,
    /// `14 / k^(1/4)`.
    pub quarter_root: f64,
    /// `11 / sqrt(k)`.
    pub simple_graph: f64,
    /// `r / sqrt(k)`.
    pub signal: f64,
    /// `15 L / sqrt(log k)`, when a Lipschitz constant is given.
    pub mpnn: Option<f64>,
}

pub fn sampling_bounds(k: f64, r: f64, lipschitz: Option<f64>, base: LogBase) -> Result<SamplingBounds> {
    if !(k >= 2.0) {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    let s = 15.0 / base.log(k).sqrt();
    Ok(SamplingBounds {
        cut_distance: s,
        quarter_root: 14.0 / k.powf(0.25),
        simple_graph: 11.0 / k.sqrt(),
        signal: r / k.sqrt(),
        mpnn: lipschitz.map(|l| l * s),
    })
}

/// `2^J exp(-2 lambda^2)`.
pub fn bhc_tail(j: usize, lambda: f64) -> f64 {
    (j as f64 * LN_2 - 2.0 * lambda * lambda).exp()
}

/// `lambda` at which the tail equals `p`.
pub fn bhc_lambda(j: usize, p: f64) -> f64 {
    ((j as f64 * LN_2 + (1.0 / p).ln()) / 2.0).sqrt()
}

/// Threshold on `sum_i |S_i / N - p_i|` exceeded with probability at most
/// `p`: `sqrt((2 J ln 2 + 2 ln(1/p)) / N)`.
pub fn bhc_deviation(j: usize, n: usize, p: f64) -> f64 {
    ((2.0 * j as f64 * LN_2 + 2.0 * (1.0 / p).ln()) / n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultinomialReport {
    pub cells: usize,
    pub draws: usize,
    pub p: f64,
    pub simulations: usize,
    pub threshold: f64,
    pub violations: usize,
    pub rate: f64,
    /// `p + 3 sqrt(p (1 - p) / simulations)`.
    pub allowed: f64,
    pub pass: bool,
    /// `sum_i |S_i / N - p_i|` per simulation.
    pub deviations: Vec<f64>,
}

/// Simulates `simulations` multinomial samples of `draws` draws over `cells`
/// cells (uniform unless `probs` is given) and counts how often the total
/// variation deviation exceeds the matched threshold.
pub fn multinomial_check(
    cells: usize,
    draws: usize,
    p: f64,
    simulations: usize,
    probs: Option<&[f64]>,
    seed: u64,
) -> Result<MultinomialReport> {
    if cells == 0 || draws == 0 || simulations == 0 || !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument("need cells, draws, simulations >= 1 and 0 < p < 1".into()));
    }
    let probs: Vec<f64> = match probs {
        Some(q) if q.len() == cells => q.to_vec(),
        Some(q) => {
            return Err(Error::Dimension(format!("{} probabilities for {cells} cells", q.len())));
        }
        None => vec![1.0 / cells as f64; cells],
    };
    let cum: Vec<f64> = probs
        .iter()
        .scan(0.0, |a, q| {
            *a += q;
            Some(*a)
        })
        .collect();
    let threshold = bhc_deviation(cells, draws, p);
    let deviations: Vec<f64> = (0..simulations as u64)
        .into_par_iter()
        .map(|s| {
            let mut g = rng::stream(seed, s);
            let mut counts = vec![0usize; cells];
            for _ in 0..draws {
                let u: f64 = g.gen();
                counts[cum.partition_point(|&c| c <= u).min(cells - 1)] += 1;
            }
            counts
                .iter()
                .zip(&probs)
                .map(|(&n, q)| (n as f64 / draws as f64 - q).abs())
                .sum()
        })
        .collect();
    let violations = deviations.iter().filter(|&&d| d >= threshold).count();
    let rate = violations as f64 / simulations as f64;
    let allowed = p + 3.0 * (p * (1.0 - p) / simulations as f64).sqrt();
    Ok(MultinomialReport {
        cells,
        draws,
        p,
        simulations,
        threshold,
        violations,
        rate,
        allowed,
        pass: rate <= allowed,
        deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_examples() {
        let e = recurrence(&[2.0; 3], &[1.0; 3], 0.0).unwrap();
        assert_eq!(e, vec![0.0, 1.0, 3.0, 7.0]);
        assert_eq!(recurrence_closed(&[2.0; 3], &[1.0; 3], 0.0, 3), 7.0);
        assert_eq!(recurrence_constant(2.0, 1.0, 0.0, 3), 7.0);

        let a = [1.5, 0.5, 3.0, 2.0];
        let e = recurrence(&a, &[0.0; 4], 2.0).unwrap();
        assert_eq!(e[4], 2.0 * a.iter().product::<f64>());

        let b = [0.25, 1.0, -2.0, 4.0];
        let e = recurrence(&[1.0; 4], &b, 3.0).unwrap();
        assert_eq!(e[4], 3.0 + b.iter().sum::<f64>());

        let a = [1.5, 0.5, 3.0, 2.0];
        let e = recurrence(&a, &b, 0.7).unwrap();
        for t in 0..=4 {
            assert!((recurrence_closed(&a, &b, 0.7, t) - e[t]).abs() < 1e-12);
        }
        assert!(recurrence(&a, &b[..2], 0.0).is_err());
    }

    #[test]
    fn hidden_bound_examples() {
        let h = hidden_feature_bound(2.0, 2.0, 2.0, 2.0, 0, HiddenCoeff::Six);
        assert_eq!(h.bound.value, Some(768.0));
        let h = hidden_feature_bound(2.0, 2.0, 2.0, 2.0, 1, HiddenCoeff::Six);
        assert!((h.bound.value.unwrap() - 589_824.0).abs() < 1e-6);
        assert!(h.flags.is_empty());
        let h = hidden_feature_bound(2.0, 2.0, 2.0, 2.0, 10, HiddenCoeff::Six);
        assert_eq!(h.bound.value, None);
        assert!((h.bound.log2 - 1024.0 * 768f64.log2()).abs() < 1e-9);
        let weak = hidden_feature_bound(1.0, 2.0, 2.0, 0.5, 1, HiddenCoeff::Four);
        assert_eq!(weak.flags.len(), 2);
    }

    #[test]
    fn lipschitz_one_layer_by_hand() {
        let net = NetworkConstants { k: 1.0, l: 2.0, b: 2.0, t: 1, d: 1.0 };
        let c = mpnn_lipschitz_constants(&net, 2.0, HiddenCoeff::Six);
        // r_0 = 2: a_0 = 4 (8*2 + 4*2) + 2 = 98, b_0 = 4 (4*2 + 2*2)^2 = 576
        let v = |b: BoundValue| b.value.unwrap();
        assert!((v(c.layers[1].signal) - 98.0).abs() < 1e-9);
        assert!((v(c.layers[1].kernel) - 576.0).abs() < 1e-9);
        assert!((v(c.l_ht) - 576.0).abs() < 1e-9);
        assert!((v(c.l_h) - 1152.0).abs() < 1e-9);
        assert_eq!(v(c.layers[0].signal), 1.0);
        assert_eq!(c.layers[0].kernel.value, Some(0.0));
        // B_H = L r_1 + B with r_1 = (6*1*8*4)^2 * 2^2
        assert!((v(c.b_h) - (2.0 * 192f64.powi(2) * 4.0 + 2.0)).abs() < 1e-6);
    }

    #[test]
    fn lipschitz_matches_linear_recurrence() {
        let net = NetworkConstants { k: 2.0, l: 1.5, b: 1.25, t: 3, d: 2.0 };
        let r = 1.1;
        let c = mpnn_lipschitz_constants(&net, r, HiddenCoeff::Four);
        let rs: Vec<f64> = (0..3)
            .map(|j| if j == 0 { r } else { (4.0 * 2.0 * 1.5f64.powi(3) * 1.25f64.powi(2) * r).powf((j as f64).exp2()) })
            .collect();
        let a: Vec<f64> = rs.iter().map(|&x| 4.0 * 2.0 * 2.0 * (1.5f64.powi(3) * x + 1.5f64.powi(2) * 1.25) + 1.5).collect();
        let b: Vec<f64> = rs.iter().map(|&x| 4.0 * 2.0 * (1.5f64.powi(2) * x + 1.5 * 1.25).powi(2)).collect();
        // the kernel coefficient solves the recurrence started at zero
        let kernel = recurrence(&a, &b, 0.0).unwrap()[3];
        let signal = recurrence(&a, &[0.0; 3], 1.0).unwrap()[3];
        let rel = |x: f64, y: f64| ((x - y) / y).abs();
        assert!(rel(c.layers[3].kernel.value.unwrap(), kernel) < 1e-9);
        assert!(rel(c.layers[3].signal.value.unwrap(), signal) < 1e-9);
    }

    #[test]
    fn simplified_examples() {
        assert_eq!(simplified_mpnn_bound(1.0, false), (1.0, 2.0));
        assert_eq!(simplified_mpnn_bound(1.0, true), (1.0, 1.0));
        assert_eq!(simplified_mpnn_bound(0.0, false), (1.0, 0.0));
    }

    #[test]
    fn covering_examples() {
        let c = covering_number_log2(1.0, 2.0, CoveringPreset::Sharp).unwrap();
        assert_eq!(c.k, Some(16.0));
        assert_eq!(c.log2_kappa, 256.0);
        assert!(c.exact_ceiling);
        let c = covering_number_log2(2.0, 2.0, CoveringPreset::Sharp).unwrap();
        assert_eq!(c.log2_kappa, 4.0);
        let tiny = covering_number_log2(0.01, 2.0, CoveringPreset::Conservative).unwrap();
        assert!(!tiny.exact_ceiling);
        assert_eq!(tiny.log2_log2_kappa, 2.0 * 2.25 * 2.0 / 1e-4);
        let mut last = f64::INFINITY;
        for eps in [0.3, 0.5, 0.8, 1.0, 1.7, 3.0] {
            let c = covering_number_log2(eps, 1.5, CoveringPreset::Sharp).unwrap();
            assert!(c.log2_kappa <= last);
            last = c.log2_kappa;
        }
    }

    #[test]
    fn xi_round_trip_and_monotone() {
        let mut last = f64::INFINITY;
        for n in [10.0, 1e3, 1e6] {
            let x = xi_inverse(n, 2.0, CoveringPreset::Sharp, 1.0).unwrap();
            let back = ln_xi(x.r, 2.0, CoveringPreset::Sharp).exp();
            assert!(((back - n) / n).abs() <= 1e-6);
            assert!(x.r <= last);
            last = x.r;
        }
        assert!(xi_inverse(0.5, 2.0, CoveringPreset::Sharp, 1.0).is_err());
    }

    #[test]
    fn generalization_examples() {
        let base = GeneralizationParams {
            n: 1e4,
            p: 1.0,
            l_e: 1.0,
            l_h: 1.0,
            b_h: 1.0,
            e00: 0.0,
            c: 2.0,
            preset: CoveringPreset::Sharp,
            window: 1.0,
        };
        let g = generalization_bound(&base).unwrap();
        let r = g.xi_inverse.r;
        let expect = r * (2.0 + 2f64.sqrt() * (LN_2 / 1e4).sqrt());
        assert!((g.value - expect).abs() < 1e-12);
        assert_eq!(g.loss_bound, 2.0);
        assert!(generalization_bound(&GeneralizationParams { p: 0.0, ..base }).is_err());
    }

    #[test]
    fn sampling_examples() {
        let s = sampling_bounds(1024.0, 1.0, Some(2.0), LogBase::Two).unwrap();
        assert!((s.cut_distance - 15.0 / 10f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.mpnn, Some(2.0 * s.cut_distance));
        assert_eq!(sampling_bounds(16.0, 1.0, None, LogBase::Two).unwrap().simple_graph, 2.75);
        assert_eq!(sampling_bounds(100.0, 1.0, None, LogBase::Two).unwrap().signal, 0.1);
        assert!(sampling_bounds(1.0, 1.0, None, LogBase::Two).is_err());
    }

    #[test]
    fn bhc_examples() {
        assert!(bhc_tail(4, 50.0) < 1e-300);
        assert!((bhc_tail(4, bhc_lambda(4, 0.05)) - 0.05).abs() < 1e-12);
        let one = multinomial_check(1, 100, 0.05, 20, None, 0).unwrap();
        assert!(one.deviations.iter().all(|&d| d == 0.0));
        assert_eq!(one.violations, 0);
    }

    #[test]
    fn log2_arithmetic() {
        let a = Log2::of(3.0);
        let b = Log2::of(5.0);
        assert!((a.add(b).value() - 8.0).abs() < 1e-12);
        assert!((a.mul(b).value() - 15.0).abs() < 1e-12);
        assert_eq!(Log2::ZERO.add(Log2::ZERO), Log2::ZERO);
        assert!((Log2::ZERO.add(a).value() - 3.0).abs() < 1e-12);
    }
}
