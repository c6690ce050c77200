//! Exact window counts over moduli sets and Farey fractions: `A_t(u,k,l)`,
//! `K(Δ)`, `P(α)`, `Π(δ,y)`, plus Dirichlet approximation by continued
//! fractions.
//!
//! Every quantity here is an exact enumeration. Comparisons between a
//! rational gap and a real threshold are done in integer arithmetic (see
//! [`ratio_le`]) so that fractions sitting exactly on a window edge are
//! classified the same way by the fast paths and by the oracles.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd_i64, residue};
use crate::error::{Error, Result};
use crate::moduli::{square_divisor_profile, FareyList, ModuliSet};

/// `α = b/r + z` with `r ≤ τ`, `gcd(b, r) = 1` and `|z| ≤ 1/(rτ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalApprox {
    pub b: i64,
    pub r: u64,
    pub z: f64,
    pub tau: f64,
}

/// Splits a positive finite float into `m·2^e`.
pub(crate) fn decompose(x: f64) -> (u64, i32) {
    debug_assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

/// Exact test of `num/den ≤ x` for `den > 0`, `x ≥ 0`.
pub fn ratio_le(num: u128, den: u128, x: f64) -> bool {
    debug_assert!(den > 0);
    if num == 0 {
        return x >= 0.0;
    }
    if x.is_infinite() {
        return x > 0.0;
    }
    if x <= 0.0 {
        return false;
    }
    let (m, e) = decompose(x);
    if e >= 0 {
        // num ≤ m·2^e·den
        match (m as u128)
            .checked_mul(den)
            .and_then(|v| v.checked_shl(e as u32).filter(|s| s >> e == v))
        {
            Some(rhs) => num <= rhs,
            None => true,
        }
    } else {
        // num·2^(−e) ≤ m·den
        let Some(rhs) = (m as u128).checked_mul(den) else {
            return shifted_le(num, -e, m, den);
        };
        match num.checked_shl((-e) as u32).filter(|s| s >> (-e) == num) {
            Some(lhs) => lhs <= rhs,
            None => false,
        }
    }
}

// Only reached for denominators beyond 2^75, far outside desk-scale moduli.
fn shifted_le(num: u128, neg_e: i32, m: u64, den: u128) -> bool {
    num as f64 * 2f64.powi(neg_e) <= m as f64 * den as f64
}

/// Best rational approximation of `alpha` with denominator at most `tau`:
/// the last continued-fraction convergent `b/r` with `r ≤ τ`.
pub fn dirichlet_approx(alpha: f64, tau: f64) -> Result<RationalApprox> {
    if !alpha.is_finite() || !tau.is_finite() || tau < 1.0 {
        return Err(Error::Domain(format!(
            "dirichlet_approx needs finite alpha and tau >= 1 (got {alpha}, {tau})"
        )));
    }
    // alpha as the exact fraction num/den with den a power of two ≤ 2^100
    let (num, den) = if alpha == alpha.trunc() {
        (alpha as i128, 1i128)
    } else {
        let (_, e) = decompose(alpha.abs());
        let s = (-e).min(100);
        let scaled = alpha * 2f64.powi(s);
        (scaled.round() as i128, 1i128 << s)
    };

    let (mut h, mut k) = (num, den);
    let a0 = h.div_euclid(k);
    let (mut p_prev, mut q_prev) = (1i128, 0i128);
    let (mut p, mut q) = (a0, 1i128);
    (h, k) = (k, h - a0 * k);
    while k != 0 {
        let a = h.div_euclid(k);
        let next = a
            .checked_mul(q)
            .and_then(|v| v.checked_add(q_prev))
            .zip(a.checked_mul(p).and_then(|v| v.checked_add(p_prev)));
        let Some((q_next, p_next)) = next else { break };
        if q_next as f64 > tau {
            break;
        }
        (p_prev, q_prev, p, q) = (p, q, p_next, q_next);
        (h, k) = (k, h - a * k);
    }
    let b: i64 = p
        .try_into()
        .map_err(|_| Error::Domain(format!("numerator of approximation to {alpha} overflows")))?;
    let r = q as u64;
    let rf = r as f64;
    let z = rf.mul_add(alpha, -(b as f64)) / rf;
    Ok(RationalApprox { b, r, z, tau })
}

/// Arguments of `A_t(u, k, l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowQuery {
    u: f64,
    k: u64,
    l: i64,
    t: u64,
}

impl WindowQuery {
    pub fn new(u: f64, k: u64, l: i64, t: u64) -> Result<Self> {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::Domain(format!("window length {u} must be >= 0")));
        }
        if k == 0 || t == 0 {
            return Err(Error::Domain("k and t must be positive".into()));
        }
        if gcd_i64(k as i64, l) != 1 {
            return Err(Error::NotCoprime { a: k as i64, b: l });
        }
        Ok(Self { u, k, l, t })
    }

    pub fn u(&self) -> f64 {
        self.u
    }
    pub fn k(&self) -> u64 {
        self.k
    }
    pub fn l(&self) -> i64 {
        self.l
    }
    pub fn t(&self) -> u64 {
        self.t
    }
}

/// Number of `c` in the sorted slice with `lo < c ≤ lo + u`.
fn count_in_window(sorted: &[u64], left: f64, u: f64) -> usize {
    let right = left + u;
    let a = sorted.partition_point(|&c| c as f64 <= left);
    let b = sorted.partition_point(|&c| c as f64 <= right);
    b.saturating_sub(a)
}

/// `max_{lo ≤ y ≤ hi} #{c : y < c ≤ y+u}` for a sorted, duplicate-free slice.
///
/// The count is a step function of `y` that rises only at `y = c − u`, so
/// the maximum sits at `y = lo`, at `y = hi`, or at some `y = c_j − u` in
/// between; the latter window has right end exactly `c_j` and holds the
/// `c_i ≤ c_j` with `c_j − c_i < u`.
pub fn max_window_count(sorted: &[u64], u: f64, lo: f64, hi: f64) -> u64 {
    if sorted.is_empty() || u <= 0.0 {
        return 0;
    }
    let mut best = count_in_window(sorted, lo, u).max(count_in_window(sorted, hi, u));
    let mut left = 0usize;
    for (j, &cj) in sorted.iter().enumerate() {
        let y = cj as f64 - u;
        if y < lo || y > hi {
            continue;
        }
        while ((cj - sorted[left]) as f64) >= u {
            left += 1;
        }
        best = best.max(j + 1 - left);
    }
    best as u64
}

/// `A_t(u, k, l)` for the derived set `𝒮_t`, with `y` ranging over
/// `[M/t, (M+Q)/t]` where `M`, `Q` belong to the parent set.
pub fn count_window_ap(subset: &ModuliSet, query: &WindowQuery, m: f64, q: f64) -> u64 {
    let t = query.t as f64;
    let class = residue(query.l, query.k);
    let members: Vec<u64> = subset
        .elements()
        .iter()
        .copied()
        .filter(|&c| c % query.k == class)
        .collect();
    max_window_count(&members, query.u, m / t, (m + q) / t)
}

/// `𝒮_t` split into residue classes modulo a fixed `k`, for repeated
/// `A_t` queries with varying `u` and `l`.
#[derive(Debug, Clone)]
pub struct ClassWindows {
    k: u64,
    lo: f64,
    hi: f64,
    classes: HashMap<u64, Vec<u64>>,
}

impl ClassWindows {
    pub fn new(subset: &ModuliSet, k: u64, t: u64, m: f64, q: f64) -> Self {
        assert!(k >= 1 && t >= 1);
        let mut classes: HashMap<u64, Vec<u64>> = HashMap::new();
        for &c in subset.elements() {
            classes.entry(c % k).or_default().push(c);
        }
        Self {
            k,
            lo: m / t as f64,
            hi: (m + q) / t as f64,
            classes,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// `A_t(u, k, l)`.
    pub fn max_count(&self, u: f64, l: i64) -> u64 {
        self.classes
            .get(&residue(l, self.k))
            .map_or(0, |c| max_window_count(c, u, self.lo, self.hi))
    }

    pub fn class(&self, l: i64) -> &[u64] {
        self.classes
            .get(&residue(l, self.k))
            .map_or(&[], |v| v.as_slice())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

/// Forward circular gap from entry `i` to entry `j` of a sorted Farey list,
/// as an exact fraction; `wrap` adds one full turn.
pub(crate) fn circular_gap(farey: &FareyList, i: usize, j: usize, wrap: bool) -> (u128, u128) {
    let e = farey.entries();
    let (ai, qi) = (e[i].a as i128, e[i].q as i128);
    let (aj, qj) = (e[j].a as i128, e[j].q as i128);
    let aj = if wrap { aj + qj } else { aj };
    let num = aj * qi - ai * qj;
    let num = if num < 0 { num + qi * qj } else { num };
    (num as u128, (qi * qj) as u128)
}

/// `K(Δ)`: the largest number of Farey points within circular distance `Δ`
/// of a single real `α`.
///
/// A closed arc of length `2Δ` can be slid forward until its left end meets
/// a point, so it suffices to try arcs starting at each point; the far end
/// is tracked with a second pointer over the list unrolled once.
pub fn k_delta(farey: &FareyList, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::InvalidDelta(delta));
    }
    let n = farey.len();
    if n == 0 {
        return Err(Error::EmptySet("K(Δ) of an empty Farey list".into()));
    }
    let width = 2.0 * delta;
    if width >= 1.0 {
        return Ok(n as u64);
    }
    let mut best = 0usize;
    let mut j = 0usize;
    for i in 0..n {
        j = j.max(i);
        while j < i + n {
            let (num, den) = circular_gap(farey, i, j % n, j >= n);
            if !ratio_le(num, den, width) {
                break;
            }
            j += 1;
        }
        best = best.max(j - i);
    }
    Ok(best as u64)
}

/// `P(α)`: Farey points with value in `[α−Δ, α+Δ]` on the real line.
pub fn p_alpha(farey: &FareyList, alpha: f64, delta: f64) -> u64 {
    let (lo, hi) = (alpha - delta, alpha + delta);
    let e = farey.entries();
    let a = e.partition_point(|x| x.value < lo);
    let b = e.partition_point(|x| x.value <= hi);
    b.saturating_sub(a) as u64
}

/// `P(α)` with circular distance `‖x − α‖ ≤ Δ`, the convention of `K(Δ)`.
pub fn p_alpha_circular(farey: &FareyList, alpha: f64, delta: f64) -> u64 {
    farey
        .values()
        .filter(|&v| circular_distance(v, alpha) <= delta)
        .count() as u64
}

/// Distance from `x − y` to the nearest integer.
pub fn circular_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// `Π(δ, y)`: pairs `(q, m)` with `q ∈ 𝒮 ∩ [y−δ, y+δ]`, `m ≡ −bq (mod r)`,
/// `m ≠ 0` and `m ∈ [(y−4δ)rz, (y+4δ)rz]`, counted by walking the
/// progression of `m` for each `q`.
pub fn pi_count(set: &ModuliSet, b: i64, r: u64, z: f64, delta: f64, y: f64) -> Result<u64> {
    if r == 0 || gcd_i64(b, r as i64) != 1 {
        return Err(Error::NotCoprime { a: b, b: r as i64 });
    }
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!("delta {delta} must be positive")));
    }
    let (lo_q, hi_q) = (y - delta, y + delta);
    let el = set.elements();
    let start = el.partition_point(|&q| (q as f64) < lo_q);
    let end = el.partition_point(|&q| (q as f64) <= hi_q);
    let rf = r as f64;
    let (a, c) = ((y - 4.0 * delta) * rf * z, (y + 4.0 * delta) * rf * z);
    let (lo_m, hi_m) = if a <= c { (a, c) } else { (c, a) };
    let mut count = 0u64;
    for &q in &el[start..end] {
        let class = residue(-(b as i128 * q as i128 % r as i128) as i64, r) as i64;
        let steps = ((lo_m - class as f64) / rf).ceil() as i64;
        let mut m = class + steps * r as i64;
        while (m as f64) < lo_m {
            m += r as i64;
        }
        while (m as f64) <= hi_m {
            if m != 0 {
                count += 1;
            }
            m += r as i64;
        }
    }
    Ok(count)
}

/// `δ_t(k, l)`: solutions of `x²·g_t ≡ l (mod k)`.
pub fn delta_t(t: u64, k: u64, l: i64) -> u64 {
    let (_, g) = square_divisor_profile(t);
    arith::quad_cong_roots(g, l, k).count
}

/// Counting bound for square moduli in `(Q₀, 2Q₀]`:
/// `A_t(u,k,l) ≤ δ_t(k,l)·(⌊L/k⌋ + 1)` with
/// `L = √((Q₀/t + u)/g_t) − √(Q₀/(t·g_t))`.
///
/// `S_t(Q₀) = {q₂²g_t}`, so a window `(y, y+u]` with `y ≥ Q₀/t` meets at most
/// `L` consecutive values of `q₂` in a half-open range, and each admissible
/// residue of `q₂` mod `k` occurs at most `⌊L/k⌋ + 1` times there.
pub fn square_window_bound(q0: f64, t: u64, u: f64, k: u64, l: i64) -> u64 {
    let (_, g) = square_divisor_profile(t);
    let tf = t as f64;
    let gf = g as f64;
    let len = ((q0 / tf + u) / gf).sqrt() - (q0 / (tf * gf)).sqrt();
    // 1e-9 absorbs rounding in the two square roots when L/k is integral
    let per_class = (len / k as f64 + 1e-9).floor() as u64 + 1;
    delta_t(t, k, l) * per_class
}
