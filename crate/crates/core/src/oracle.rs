//! Brute-force reference implementations.
//!
//! Each function here recomputes a quantity from its definition by
//! exhaustive enumeration, sharing no code path with the fast routine it
//! checks beyond the elementary exact comparison [`ratio_le`].

use num_complex::Complex64;

use crate::arith::{gcd, residue};
use crate::counting::ratio_le;
use crate::moduli::{FareyList, ModuliSet};
use crate::phase::e;
use crate::sequence::CoefficientSequence;

/// All `x ∈ [0, k)` with `x²·g ≡ l (mod k)`, by scanning every residue.
pub fn quad_roots_scan(g: u64, l: i64, k: u64) -> Vec<u64> {
    let target = residue(l, k) as u128;
    (0..k)
        .filter(|&x| (x as u128 * x as u128 % k as u128 * (g % k) as u128) % k as u128 == target)
        .collect()
}

/// Trial-division product check: every factor divides and nothing is left.
pub fn factorization_multiplies_back(n: u64, prime_powers: &[(u64, u32)]) -> bool {
    let mut rest = n;
    for &(p, e) in prime_powers {
        for _ in 0..e {
            if !rest.is_multiple_of(p) {
                return false;
            }
            rest /= p;
        }
        if (2..p).take_while(|d| d * d <= p).any(|d| p % d == 0) {
            return false;
        }
    }
    rest == 1 && prime_powers.windows(2).all(|w| w[0].0 < w[1].0)
}

/// `S(α)` by summing `a_n·e(nα)` with no argument tricks.
pub fn exp_sum_naive(seq: &CoefficientSequence, alpha: f64) -> Complex64 {
    seq.values()
        .iter()
        .enumerate()
        .map(|(i, a)| a * e((i + 1) as f64 * alpha))
        .sum()
}

/// `Σ_{q∈𝒮} Σ_{(a,q)=1} |S(a/q)|²` as a plain double loop, evaluating each
/// `S(a/q)` directly from the exact phase `na mod q`.
pub fn sieve_lhs_naive(seq: &CoefficientSequence, set: &ModuliSet) -> f64 {
    let mut total = 0.0;
    for &q in set.elements() {
        for a in 1..=q {
            if gcd(a, q) != 1 {
                continue;
            }
            let s: Complex64 = seq
                .values()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let ph = ((i as u128 + 1) * a as u128 % q as u128) as f64 / q as f64;
                    c * e(ph)
                })
                .sum();
            total += s.norm_sqr();
        }
    }
    total
}

/// A window position for `A_t`: either a real left end, or the window
/// `(c − u, c]` whose right end is exactly the integer `c`.
#[derive(Debug, Clone, Copy)]
enum Candidate {
    Left(f64),
    RightEnd(u64),
}

/// `A_t(u,k,l)` by evaluating the count at every critical `y` with a full
/// scan of `𝒮_t` for each.
pub fn window_count_scan(subset: &ModuliSet, u: f64, k: u64, l: i64, lo: f64, hi: f64) -> u64 {
    let class = residue(l, k);
    let mut candidates = vec![Candidate::Left(lo), Candidate::Left(hi)];
    for &c in subset.elements() {
        if c % k != class {
            continue;
        }
        let y = c as f64 - u;
        candidates.push(if y < lo {
            Candidate::Left(lo)
        } else if y > hi {
            Candidate::Left(hi)
        } else {
            Candidate::RightEnd(c)
        });
    }
    if u <= 0.0 {
        return 0;
    }
    candidates
        .into_iter()
        .map(|cand| {
            subset
                .elements()
                .iter()
                .filter(|&&c| c % k == class)
                .filter(|&&c| match cand {
                    Candidate::Left(y) => (c as f64) > y && (c as f64) <= y + u,
                    Candidate::RightEnd(r) => c <= r && ((r - c) as f64) < u,
                })
                .count() as u64
        })
        .max()
        .unwrap_or(0)
}

/// `K(Δ)` by trying an arc `[α_i, α_i + 2Δ]` at every point and testing
/// every other point against it.
pub fn k_delta_scan(farey: &FareyList, delta: f64) -> u64 {
    let e = farey.entries();
    let width = 2.0 * delta;
    let mut best = 0u64;
    for left in e {
        let mut count = 0u64;
        for other in e {
            // forward gap (other − left) mod 1 as an exact fraction
            let num = other.a as i128 * left.q as i128 - left.a as i128 * other.q as i128;
            let den = left.q as i128 * other.q as i128;
            let gap = num.rem_euclid(den);
            if ratio_le(gap as u128, den as u128, width) {
                count += 1;
            }
        }
        best = best.max(count);
    }
    if width >= 1.0 {
        best = e.len() as u64;
    }
    best
}

/// `P(α)` by a linear scan.
pub fn p_alpha_scan(farey: &FareyList, alpha: f64, delta: f64) -> u64 {
    let (lo, hi) = (alpha - delta, alpha + delta);
    farey.values().filter(|&v| v >= lo && v <= hi).count() as u64
}

/// `Π(δ, y)` by counting each progression in closed form.
pub fn pi_count_closed_form(set: &ModuliSet, b: i64, r: u64, z: f64, delta: f64, y: f64) -> u64 {
    let rf = r as f64;
    let (a, c) = ((y - 4.0 * delta) * rf * z, (y + 4.0 * delta) * rf * z);
    let (lo, hi) = (a.min(c), a.max(c));
    set.elements()
        .iter()
        .filter(|&&q| (q as f64) >= y - delta && (q as f64) <= y + delta)
        .map(|&q| {
            let class = residue(-(b as i128 * q as i128 % r as i128) as i64, r) as f64;
            // m = class + r·s with lo ≤ m ≤ hi
            let s_lo = ((lo - class) / rf).ceil() as i64;
            let s_hi = ((hi - class) / rf).floor() as i64;
            let n = (s_hi - s_lo + 1).max(0) as u64;
            let zero_in = class == 0.0 && lo <= 0.0 && hi >= 0.0;
            n - u64::from(zero_in && n > 0)
        })
        .sum()
}

/// The bracket maximum of the general large sieve bound over the given `z`
/// values for each `r`, with every `A_t` found by [`window_count_scan`] on
/// a subset rebuilt from its definition.
pub fn bracket_scan(set: &ModuliSet, n: u64, z_points: impl Fn(u64) -> Vec<f64>) -> f64 {
    let span = set.span();
    let mut best = 0u64;
    let mut r = 1u64;
    while r * r <= n {
        for h in (0..r).filter(|&h| gcd(h, r) == 1) {
            for &z in &z_points(r) {
                let mut total = 0u64;
                for t in (1..=r).filter(|&t| r.is_multiple_of(t)) {
                    let k = r / t;
                    let tf = t as f64;
                    let elements: Vec<u64> = set
                        .elements()
                        .iter()
                        .filter(|&&q| q % t == 0)
                        .map(|&q| q / t)
                        .collect();
                    if elements.is_empty() {
                        continue;
                    }
                    let (lo, hi) = (set.offset() / tf, (set.offset() + span) / tf);
                    let sub = ModuliSet::explicit_in(elements, lo, span / tf).expect("subset");
                    let u = 2.0 * span / (tf * z * n as f64);
                    let m_max = (6.0 * r as f64 * z * span / tf).floor() as i64;
                    for m in (1..=m_max).filter(|&m| gcd(m as u64, k) == 1) {
                        let hm = h as i64 * m;
                        total += window_count_scan(&sub, u, k, hm, lo, hi)
                            + window_count_scan(&sub, u, k, -hm, lo, hi);
                    }
                }
                best = best.max(total);
            }
        }
        r += 1;
    }
    best as f64
}
