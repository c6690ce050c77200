//! The measured sieve sum and the right-hand sides it is compared against.
//!
//! A *shape* is the right-hand side of one of the large sieve bounds with
//! every unspecified absolute constant set to 1, expressed per unit `Z`.
//! Shapes are reported next to the measured sum as ratios; only the
//! classical inequality is constant-free and can be checked outright.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, gcd_i64, mod_inv};
use crate::counting::{dirichlet_approx, p_alpha, ClassWindows};
use crate::error::{Error, Result};
use crate::moduli::{
    build_moduli_set, derive_subset, enumerate_farey, ModuliKind, ModuliSet, DEFAULT_FAREY_LIMIT,
};
use crate::sequence::{CoefficientSequence, ModulusEvaluator};

/// Shape names in report order.
pub const SHAPE_NAMES: [&str; 11] = [
    "classical",
    "single_modulus",
    "Z1",
    "Z2",
    "zhao",
    "zhao_conjecture",
    "thm2",
    "thm3",
    "thm4",
    "elliott",
    "wolke",
];

/// `Σ_{q∈𝒮} Σ_{1≤a≤q, (a,q)=1} |S(a/q)|²`.
pub fn sieve_lhs(seq: &CoefficientSequence, set: &ModuliSet) -> Result<f64> {
    sieve_lhs_with_limit(seq, set, DEFAULT_FAREY_LIMIT)
}

pub fn sieve_lhs_with_limit(seq: &CoefficientSequence, set: &ModuliSet, limit: u64) -> Result<f64> {
    let needed = set.farey_size();
    if needed > limit {
        return Err(Error::CapacityExceeded { needed, limit });
    }
    let per_modulus: Vec<f64> = set
        .elements()
        .par_iter()
        .map(|&q| ModulusEvaluator::new(seq, q).energy(true))
        .collect();
    // fixed summation order regardless of worker count
    Ok(per_modulus.iter().sum())
}

/// Inputs of [`bound_shapes`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub n: f64,
    pub q: f64,
    /// `S = |𝒮|`.
    pub s_count: f64,
    pub q0: Option<f64>,
    pub eps: f64,
    /// Well-distribution factor of the moduli set.
    pub x: f64,
}

impl ShapeParams {
    pub fn new(n: f64, q: f64, s_count: f64) -> Self {
        Self {
            n,
            q,
            s_count,
            q0: None,
            eps: 0.0,
            x: 1.0,
        }
    }
}

/// `δ` with `N = Q^{1+δ}`, when `Q ≥ 10` and `0 < δ < 1`.
pub fn wolke_exponent(n: f64, q: f64) -> Result<f64> {
    if q < 10.0 {
        return Err(Error::Domain(format!(
            "Wolke's bound needs Q >= 10, got {q}"
        )));
    }
    let delta = n.ln() / q.ln() - 1.0;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "Wolke's bound needs N = Q^(1+δ) with 0 < δ < 1, got δ = {delta}"
        )));
    }
    Ok(delta)
}

/// `Q² log log Q / ((1−δ) log Q)` for primes up to `Q`.
pub fn wolke_shape(n: f64, q: f64) -> Result<f64> {
    let delta = wolke_exponent(n, q)?;
    Ok(q * q * q.ln().ln() / ((1.0 - delta) * q.ln()))
}

/// Which branch of the two-regime square-moduli bound applies:
/// `Q ≤ N^{5/12}`, compared as `Q^{12} ≤ N^5`.
pub fn thm4_small_q(n: f64, q: f64) -> bool {
    q.powi(12) <= n.powi(5)
}

/// Every applicable shape, per unit `Z`, with constants equal to 1.
pub fn bound_shapes(p: &ShapeParams) -> Result<BTreeMap<String, f64>> {
    let ShapeParams {
        n,
        q,
        s_count: s,
        eps,
        x,
        ..
    } = *p;
    if !(n > 0.0 && q > 0.0 && s >= 0.0 && x > 0.0 && eps >= 0.0) {
        return Err(Error::Domain(format!("invalid shape parameters {p:?}")));
    }
    let n_eps = n.powf(eps);
    let log2q = (2.0 * q).ln();
    let mut out = BTreeMap::new();
    let mut put = |name: &str, v: f64| {
        out.insert(name.to_string(), v);
    };
    put("classical", n + q * q);
    put("single_modulus", n + q * q);
    put("Z1", n + q.powi(4));
    put("Z2", q * (n + q * q));
    put(
        "zhao",
        log2q * (q.powi(3) + (n * q.sqrt() + n.sqrt() * q * q) * n_eps),
    );
    put("zhao_conjecture", q.powf(eps) * (q.powi(3) + n));
    put("thm2", n + q * x * n_eps * (n.sqrt() + s));
    put("thm3", log2q * n_eps * (q.powi(3) + n + n.sqrt() * q * q));
    put(
        "thm4",
        if thm4_small_q(n, q) {
            q.powf(0.6 + eps) * n
        } else {
            q.powf(3.0 + eps)
        },
    );
    put("elliott", n + q * s);
    if let Ok(w) = wolke_shape(n, q) {
        put("wolke", w);
    }
    Ok(out)
}

/// Measured sum alongside shapes and ratios `lhs/(shape·Z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "Q0")]
    pub q0: Option<f64>,
    #[serde(rename = "Z")]
    pub z: f64,
    pub lhs: Option<f64>,
    pub shapes: BTreeMap<String, f64>,
    pub ratios: BTreeMap<String, f64>,
    pub epsilon: f64,
    #[serde(rename = "X")]
    pub x: f64,
}

impl BoundReport {
    pub fn new(params: &ShapeParams, z: f64, lhs: Option<f64>) -> Result<Self> {
        let shapes = bound_shapes(params)?;
        let ratios = match lhs {
            Some(lhs) if z > 0.0 => shapes
                .iter()
                .map(|(k, &v)| (k.clone(), lhs / (v * z)))
                .collect(),
            _ => BTreeMap::new(),
        };
        Ok(Self {
            n: params.n,
            q: params.q,
            q0: params.q0,
            z,
            lhs,
            shapes,
            ratios,
            epsilon: params.eps,
            x: params.x,
        })
    }
}

/// Result of [`theorem1_bracket`]: the bracketed maximum `B` and the shape
/// `N(1 + B)` per unit `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub b: f64,
    pub shape: f64,
    /// Maximizing `(r, z, h)`; `None` when every term vanishes.
    pub argmax: Option<(u64, f64, u64)>,
}

/// `A_t` tables for every `t | r`, `r ≤ √N`.
struct BracketTables {
    n: f64,
    span: f64,
    /// keyed by `(t, r/t)`
    windows: HashMap<(u64, u64), ClassWindows>,
}

impl BracketTables {
    fn new(set: &ModuliSet, n: u64) -> Self {
        let mut windows = HashMap::new();
        let mut subsets: HashMap<u64, ModuliSet> = HashMap::new();
        for r in 1..=isqrt(n) {
            for t in factorize(r).divisors() {
                let sub = subsets
                    .entry(t)
                    .or_insert_with(|| derive_subset(set, t))
                    .clone();
                windows
                    .entry((t, r / t))
                    .or_insert_with(|| ClassWindows::new(&sub, r / t, t, set.offset(), set.span()));
            }
        }
        Self {
            n: n as f64,
            span: set.span(),
            windows,
        }
    }

    /// `Σ_{t|r} Σ_{0<|m|≤6rzQ/t, (m,r/t)=1} A_t(2Q/(tzN), r/t, hm)`.
    fn inner_sum(&self, r: u64, h: u64, z: f64) -> u64 {
        let mut total = 0u64;
        for t in factorize(r).divisors() {
            let k = r / t;
            let w = &self.windows[&(t, k)];
            if w.is_empty() {
                continue;
            }
            let tf = t as f64;
            let m_max = (6.0 * r as f64 * z * self.span / tf).floor() as i64;
            let u = 2.0 * self.span / (tf * z * self.n);
            for m in 1..=m_max {
                if gcd(m as u64, k) != 1 {
                    continue;
                }
                let hm = (h as i128 * m as i128) as i64;
                total += w.max_count(u, hm) + w.max_count(u, -hm);
            }
        }
        total
    }

    /// `z`-values where some term of [`Self::inner_sum`] can change.
    fn breakpoints(&self, r: u64, z_lo: f64, z_hi: f64) -> Vec<f64> {
        let mut pts = vec![z_lo, z_hi];
        for t in factorize(r).divisors() {
            let k = r / t;
            let w = &self.windows[&(t, k)];
            if w.is_empty() {
                continue;
            }
            let tf = t as f64;
            // m-range: 6rzQ/t crosses an integer
            let m_top = (6.0 * r as f64 * z_hi * self.span / tf).floor() as i64;
            for m in 1..=m_top {
                pts.push(m as f64 * tf / (6.0 * r as f64 * self.span));
            }
            // window length u = 2Q/(tzN) crosses a gap that changes A_t
            let (lo, hi) = w.range();
            for class in 0..k {
                let c = w.class(class as i64);
                let mut gaps = Vec::new();
                for (j, &cj) in c.iter().enumerate() {
                    gaps.push(cj as f64 - lo);
                    gaps.push(cj as f64 - hi);
                    for &ci in &c[..j] {
                        gaps.push((cj - ci) as f64);
                    }
                }
                for d in gaps.into_iter().filter(|&d| d > 0.0) {
                    pts.push(2.0 * self.span / (tf * d * self.n));
                }
            }
        }
        pts.retain(|&z| z >= z_lo && z <= z_hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mids: Vec<f64> = pts.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        pts.extend(mids);
        pts
    }
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Geometric grid on `[lo, hi]` with `intervals + 1` points including both
/// ends. Grids nest exactly when one interval count divides the other.
pub fn geometric_grid(lo: f64, hi: f64, intervals: usize) -> Vec<f64> {
    if hi <= lo || intervals == 0 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let g = intervals as f64;
    (0..=intervals)
        .map(|i| match i {
            0 => lo,
            _ if i == intervals => hi,
            _ => (a + (i as f64 / g) * (b - a)).exp(),
        })
        .collect()
}

/// `(r, h)` cells: `r ≤ √N`, `h` a reduced residue mod `r`.
fn bracket_cells(n: u64) -> Vec<(u64, u64)> {
    (1..=isqrt(n))
        .flat_map(|r| (0..r).filter(move |&h| gcd(h, r) == 1).map(move |h| (r, h)))
        .collect()
}

fn fold_best(
    best: Option<(u64, u64, f64, u64)>,
    cand: (u64, u64, f64, u64),
) -> Option<(u64, u64, f64, u64)> {
    // larger value wins; ties go to the smallest (r, z, h)
    match best {
        None => Some(cand),
        Some(b) => {
            let better =
                cand.0 > b.0 || (cand.0 == b.0 && (cand.1, cand.2, cand.3) < (b.1, b.2, b.3));
            Some(if better { cand } else { b })
        }
    }
}

fn finish_bracket(n: u64, best: Option<(u64, u64, f64, u64)>) -> Bracket {
    let (b, argmax) = match best {
        Some((v, r, z, h)) if v > 0 => (v as f64, Some((r, z, h))),
        _ => (0.0, None),
    };
    Bracket {
        b,
        shape: n as f64 * (1.0 + b),
        argmax,
    }
}

/// The bracketed maximum of the general large sieve bound,
///
/// `B = max_{r≤√N} max_{1/N≤z≤1/(r√N)} max_{(h,r)=1}
///      Σ_{t|r} Σ_{0<|m|≤6rzQ/t, (m,r/t)=1} A_t(2Q/(tzN), r/t, hm)`,
///
/// with `z` sampled on a geometric grid of `z_grid` intervals per `r`. The
/// result is a lower bound of the true maximum and never decreases when
/// the grid is refined by an integer factor. `h` runs over reduced residues
/// mod `r`, since `A_t` only sees `hm` modulo `r/t`.
pub fn theorem1_bracket(set: &ModuliSet, n: u64, z_grid: usize) -> Bracket {
    assert!(n >= 1 && z_grid >= 1);
    if set.is_empty() {
        return finish_bracket(n, None);
    }
    let tables = BracketTables::new(set, n);
    let sqrt_n = (n as f64).sqrt();
    let best = bracket_cells(n)
        .into_par_iter()
        .map(|(r, h)| {
            let grid = geometric_grid(1.0 / n as f64, 1.0 / (r as f64 * sqrt_n), z_grid);
            grid.into_iter()
                .map(|z| (tables.inner_sum(r, h, z), r, z, h))
                .fold(None, fold_best)
        })
        .reduce(|| None, |a, b| b.and_then(|b| fold_best(a, b)).or(a));
    finish_bracket(n, best)
}

/// [`theorem1_bracket`] evaluated at every breakpoint in `z` and at the
/// midpoint of every piece between breakpoints, which gives the exact
/// maximum. Intended for small instances.
pub fn theorem1_bracket_exact(set: &ModuliSet, n: u64) -> Bracket {
    if set.is_empty() {
        return finish_bracket(n, None);
    }
    let tables = BracketTables::new(set, n);
    let sqrt_n = (n as f64).sqrt();
    let best = bracket_cells(n)
        .into_par_iter()
        .map(|(r, h)| {
            let pts = tables.breakpoints(r, 1.0 / n as f64, 1.0 / (r as f64 * sqrt_n));
            pts.into_iter()
                .map(|z| (tables.inner_sum(r, h, z), r, z, h))
                .fold(None, fold_best)
        })
        .reduce(|| None, |a, b| b.and_then(|b| fold_best(a, b)).or(a));
    finish_bracket(n, best)
}

/// Relative slack for regime boundaries such as `z ≤ √Δ/r` that callers
/// usually compute in floating point.
const REGIME_SLACK: f64 = 1e-12;

/// Checks `r ≤ 1/√Δ` and `Δ ≤ z ≤ √Δ/r` with `0 < Δ ≤ 1/2`.
pub fn check_regime(r: u64, z: f64, delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidRegime(format!("Δ = {delta} not in (0, 1/2]")));
    }
    let tau = 1.0 / delta.sqrt();
    if r == 0 || r as f64 > tau * (1.0 + REGIME_SLACK) {
        return Err(Error::InvalidRegime(format!("r = {r} exceeds τ = {tau}")));
    }
    let z_hi = delta.sqrt() / r as f64;
    if z < delta * (1.0 - REGIME_SLACK) || z > z_hi * (1.0 + REGIME_SLACK) {
        return Err(Error::InvalidRegime(format!(
            "z = {z} outside [Δ, √Δ/r] = [{delta}, {z_hi}]"
        )));
    }
    Ok(())
}

/// `2 + Σ_{t|r} Σ_{0<|m|≤6rzQ/t, (m,r/t)=1} A_t(2ΔQ/(tz), r/t, −b̄m)`, where
/// `b̄` inverts `b` modulo `r/t`; an upper estimate for `P(b/r + z)` up to a
/// constant.
pub fn lemma4_shape(set: &ModuliSet, b: i64, r: u64, z: f64, delta: f64) -> Result<f64> {
    if r == 0 || gcd_i64(b, r as i64) != 1 {
        return Err(Error::InvalidRegime(format!("gcd({b}, {r}) must be 1")));
    }
    check_regime(r, z, delta)?;
    let span = set.span();
    let mut total = 0u64;
    for t in factorize(r).divisors() {
        let k = r / t;
        let sub = derive_subset(set, t);
        if sub.is_empty() {
            continue;
        }
        let w = ClassWindows::new(&sub, k, t, set.offset(), span);
        let b_inv = mod_inv(b, k)? as i64;
        let tf = t as f64;
        let m_max = (6.0 * r as f64 * z * span / tf).floor() as i64;
        let u = 2.0 * delta * span / (tf * z);
        for m in 1..=m_max {
            if gcd(m as u64, k) != 1 {
                continue;
            }
            let l = (-(b_inv as i128) * m as i128 % k as i128) as i64;
            total += w.max_count(u, l) + w.max_count(u, -l);
        }
    }
    Ok(2.0 + total as f64)
}

/// A point `α = b/r + z` for comparing `P(α)` with [`lemma4_shape`] on the
/// squares in `(Q₀, 2Q₀]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Instance {
    pub q0: f64,
    pub delta: f64,
    pub alpha: f64,
    pub b: i64,
    pub r: u64,
    pub z: f64,
}

/// Seeded instances: `Q₀ = ⌊10^U(1, 3.5)⌋`, `Δ = Q₀^{−θ}` with
/// `θ ~ U(1, 2)`, and `α` either uniform or within `3Δ` of a fraction
/// `a/q` with `q` in the set. `b/r + z` is the Dirichlet approximation of
/// `α` with `τ = Δ^{−1/2}`; draws with `z < Δ` are redrawn.
pub fn lemma4_instances(seed: u64, count: usize) -> Result<Vec<Lemma4Instance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let q0 = 10f64.powf(rng.random_range(1.0..3.5)).floor();
        let delta = q0.powf(-rng.random_range(1.0..2.0));
        let set = build_moduli_set(&ModuliKind::SquaresInOctave(q0))?;
        if set.is_empty() {
            continue;
        }
        for _ in 0..1000 {
            let alpha: f64 = if rng.random_bool(0.5) {
                rng.random()
            } else {
                let q = set.elements()[rng.random_range(0..set.len())];
                let a = rng.random_range(1..=q);
                a as f64 / q as f64 + rng.random_range(-3.0..3.0) * delta
            };
            if !(alpha > 0.0 && alpha < 1.0) {
                continue;
            }
            let d = dirichlet_approx(alpha, delta.powf(-0.5))?;
            if d.z >= delta && check_regime(d.r, d.z, delta).is_ok() {
                out.push(Lemma4Instance {
                    q0,
                    delta,
                    alpha,
                    b: d.b,
                    r: d.r,
                    z: d.z,
                });
                break;
            }
        }
    }
    Ok(out)
}

/// Largest `P(α) / lemma4_shape` over the instances.
pub fn measure_lemma4_constant(instances: &[Lemma4Instance]) -> Result<f64> {
    let ratios: Vec<Result<f64>> = instances
        .par_iter()
        .map(|inst| {
            let set = build_moduli_set(&ModuliKind::SquaresInOctave(inst.q0))?;
            let farey = enumerate_farey(&set)?;
            let p = p_alpha(&farey, inst.alpha, inst.delta);
            Ok(p as f64 / lemma4_shape(&set, inst.b, inst.r, inst.z, inst.delta)?)
        })
        .collect();
    ratios
        .into_iter()
        .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
}

/// `1 + Q·X·Δ^{−ε}(rz + ΔS)`.
pub fn lemma5_shape(q: f64, x: f64, eps: f64, delta: f64, r: u64, z: f64, s: f64) -> f64 {
    1.0 + q * x * delta.powf(-eps) * (r as f64 * z + delta * s)
}

/// `Δ^{−ε}(1 + Q₀rz + Q₀^{3/2}Δ)`.
pub fn r2_shape(q0: f64, eps: f64, delta: f64, r: u64, z: f64) -> f64 {
    delta.powf(-eps) * (1.0 + q0 * r as f64 * z + q0.powf(1.5) * delta)
}

/// `Δ^{−ε}(Q₀^{3/2}Δ + Q₀^{1/2}Δr^{−1/2}z^{−1} + Δ^{−1/4})`.
pub fn qq_shape(q0: f64, eps: f64, delta: f64, r: u64, z: f64) -> f64 {
    delta.powf(-eps)
        * (q0.powf(1.5) * delta + q0.sqrt() * delta / ((r as f64).sqrt() * z) + delta.powf(-0.25))
}

/// `Δ^{−ε}(Q₀^{3/2}Δ + Δ^{−1/4})`.
pub fn e4_shape(q0: f64, eps: f64, delta: f64) -> f64 {
    delta.powf(-eps) * (q0.powf(1.5) * delta + delta.powf(-0.25))
}

/// Per-point estimates for `P(b/r + z)` over squares in `(Q₀, 2Q₀]`
/// (where `Q = Q₀`). Keys: `lemma5`, `R2`, `QQ`, `E4`.
pub fn p_shape_estimates(
    r: u64,
    z: f64,
    delta: f64,
    q0: f64,
    s: f64,
    x: f64,
    eps: f64,
) -> Result<BTreeMap<String, f64>> {
    check_regime(r, z, delta)?;
    if q0.is_nan() || q0 <= 0.0 {
        return Err(Error::InvalidRegime(format!("Q₀ = {q0} must be positive")));
    }
    Ok(BTreeMap::from([
        (
            "lemma5".to_string(),
            lemma5_shape(q0, x, eps, delta, r, z, s),
        ),
        ("R2".to_string(), r2_shape(q0, eps, delta, r, z)),
        ("QQ".to_string(), qq_shape(q0, eps, delta, r, z)),
        ("E4".to_string(), e4_shape(q0, eps, delta)),
    ]))
}

/// Window half-width used for squares in `(Q₀, 2Q₀]`: `Q₀^{−6/5}` when
/// `Q₀ ≤ N^{5/6}`, else `1/N`.
pub fn octave_delta(q0: f64, n: f64) -> f64 {
    if q0.powi(6) <= n.powi(5) {
        q0.powf(-1.2)
    } else {
        1.0 / n
    }
}

/// Measured well-distribution factor: the largest
/// `A_t(u,k,l) / (1 + (S_t/k)/(Q/t)·u)` over `t ≤ √N`, `k ≤ √N/t`,
/// `(k,l) = 1` and `u` on a geometric grid over `[kQ/√N, Q/t]`.
pub fn measure_well_distribution(set: &ModuliSet, n: u64, u_grid: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let span = set.span();
    let cells: Vec<(u64, u64)> = (1..=isqrt(n))
        .flat_map(|t| (1..=(isqrt(n) / t)).map(move |k| (t, k)))
        .collect();
    let subsets: BTreeSet<u64> = cells.iter().map(|&(t, _)| t).collect();
    let subsets: HashMap<u64, ModuliSet> = subsets
        .into_iter()
        .map(|t| (t, derive_subset(set, t)))
        .collect();
    cells
        .into_par_iter()
        .map(|(t, k)| {
            let sub = &subsets[&t];
            if sub.is_empty() {
                return 1.0f64;
            }
            let w = ClassWindows::new(sub, k, t, set.offset(), span);
            let density = (sub.len() as f64 / k as f64) / (span / t as f64);
            let (u_lo, u_hi) = (k as f64 * span / sqrt_n, span / t as f64);
            if u_lo > u_hi {
                return 1.0;
            }
            let us = geometric_grid(u_lo, u_hi, u_grid);
            let mut best = 1.0f64;
            for l in (0..k).filter(|&l| gcd(l, k) == 1) {
                for &u in &us {
                    let a = w.max_count(u, l as i64) as f64;
                    best = best.max(a / (1.0 + density * u));
                }
            }
            best
        })
        .reduce(|| 1.0, f64::max)
}
