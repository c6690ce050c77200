//! Integer primitives: trial-division factorization, modular inverses and
//! the quadratic congruence `x²·g ≡ l (mod k)`.

use crate::error::{Error, Result};

/// Prime-power decomposition of a positive integer.
///
/// Primes are strictly increasing and every exponent is at least one. The
/// factorization of 1 is empty.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    prime_powers: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn prime_powers(&self) -> &[(u64, u32)] {
        &self.prime_powers
    }

    /// Number of distinct prime divisors, ω(n).
    pub fn omega(&self) -> usize {
        self.prime_powers.len()
    }

    /// Multiplies the factorization back out. Saturates on overflow, which
    /// cannot happen for factorizations produced by [`factorize`].
    pub fn value(&self) -> u64 {
        self.prime_powers
            .iter()
            .fold(1u64, |acc, &(p, e)| acc.saturating_mul(p.saturating_pow(e)))
    }

    /// Euler's totient.
    pub fn totient(&self) -> u64 {
        self.prime_powers
            .iter()
            .map(|&(p, e)| (p - 1) * p.pow(e - 1))
            .product()
    }

    /// All positive divisors in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.prime_powers {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factorizes `n` by trial division up to √n.
///
/// # Panics
///
/// Panics if `n == 0`.
pub fn factorize(mut n: u64) -> Factorization {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut prime_powers = Vec::new();
    let mut push = |n: &mut u64, p: u64| {
        let mut e = 0;
        while n.is_multiple_of(p) {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            prime_powers.push((p, e));
        }
    };
    push(&mut n, 2);
    push(&mut n, 3);
    // 6k ± 1 wheel
    let mut p = 5u64;
    while p.checked_mul(p).is_some_and(|sq| sq <= n) {
        push(&mut n, p);
        push(&mut n, p + 2);
        p += 6;
    }
    if n > 1 {
        prime_powers.push((n, 1));
    }
    Factorization { prime_powers }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> u64 {
    gcd(a.unsigned_abs(), b.unsigned_abs())
}

pub fn totient(n: u64) -> u64 {
    factorize(n).totient()
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Reduces a signed integer into `[0, m)`.
pub fn residue(a: i64, m: u64) -> u64 {
    (a as i128).rem_euclid(m as i128) as u64
}

/// Inverse of `a` modulo `m`, in `[0, m)`. Every integer is invertible
/// modulo 1 and the inverse is 0.
pub fn mod_inv(a: i64, m: u64) -> Result<u64> {
    assert!(m >= 1, "mod_inv requires m >= 1");
    if m == 1 {
        return Ok(0);
    }
    let (mut r0, mut r1) = (m as i128, residue(a, m) as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    Ok(s0.rem_euclid(m as i128) as u64)
}

/// Solutions of `x²·g ≡ l (mod k)` as a sorted list of residues in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadRoots {
    pub count: u64,
    pub roots: Vec<u64>,
}

/// Prime powers up to this size are solved by scanning every residue.
const SCAN_LIMIT: u64 = 64;

/// Solves `x²·g ≡ l (mod k)`.
///
/// Each prime power `pᵉ ∥ k` is solved separately, by a full scan when
/// `pᵉ ≤ 64` and otherwise by lifting roots one power of `p` at a time. The
/// per-prime-power solutions are recombined by Chinese remaindering.
pub fn quad_cong_roots(g: u64, l: i64, k: u64) -> QuadRoots {
    assert!(k >= 1, "quad_cong_roots requires k >= 1");
    let fac = factorize(k);
    // (modulus so far, residues so far)
    let mut acc_mod = 1u64;
    let mut acc: Vec<u64> = vec![0];
    for &(p, e) in fac.prime_powers() {
        let pe = p.pow(e);
        let local = if pe <= SCAN_LIMIT {
            scan_prime_power(g, l, pe)
        } else {
            lift_prime_power(g, l, p, e)
        };
        if local.is_empty() {
            return QuadRoots {
                count: 0,
                roots: Vec::new(),
            };
        }
        acc = crt_combine(&acc, acc_mod, &local, pe);
        acc_mod *= pe;
    }
    acc.sort_unstable();
    QuadRoots {
        count: acc.len() as u64,
        roots: acc,
    }
}

fn is_root(x: u64, g: u64, l: u64, m: u64) -> bool {
    mul_mod(mul_mod(x, x, m), g % m, m) == l
}

fn scan_prime_power(g: u64, l: i64, pe: u64) -> Vec<u64> {
    let l = residue(l, pe);
    (0..pe).filter(|&x| is_root(x, g, l, pe)).collect()
}

fn lift_prime_power(g: u64, l: i64, p: u64, e: u32) -> Vec<u64> {
    // Every root mod p^(j+1) reduces to a root mod p^j, so the candidates at
    // the next level are x + i·p^j for the current roots x.
    let mut roots = vec![0u64];
    let mut pj = 1u64;
    for _ in 0..e {
        let next = pj * p;
        let target = residue(l, next);
        let mut lifted = Vec::new();
        for &x in &roots {
            for i in 0..p {
                let cand = x + i * pj;
                if is_root(cand, g, target, next) {
                    lifted.push(cand);
                }
            }
        }
        if lifted.is_empty() {
            return lifted;
        }
        roots = lifted;
        pj = next;
    }
    roots
}

/// Combines residues mod `m1` with residues mod `m2` (coprime moduli) into
/// residues mod `m1·m2`.
fn crt_combine(r1: &[u64], m1: u64, r2: &[u64], m2: u64) -> Vec<u64> {
    if m1 == 1 {
        return r2.to_vec();
    }
    let m = m1 * m2;
    // x = a + m1·((b − a)·m1⁻¹ mod m2)
    let inv = mod_inv(m1 as i64, m2).expect("CRT moduli must be coprime");
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for &a in r1 {
        for &b in r2 {
            let diff = (b + m2 - a % m2) % m2;
            let t = mul_mod(diff, inv, m2);
            out.push((a + m1 * t) % m);
        }
    }
    out
}

/// Upper bound `2^{ω(k)+1}` on the number of solutions of `x² ≡ l* (mod k)`
/// with `gcd(l*, k) = 1`.
pub fn root_count_bound(k: u64) -> u64 {
    1u64 << (factorize(k).omega() + 1)
}
