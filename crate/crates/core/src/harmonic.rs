//! Fejér-type kernel, quadratic Gauss sums, Poisson summation checks and the
//! oscillatory integrals `E(j,l)`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::gcd_i64;
use crate::error::{Error, Result};
use crate::phase::{e, e_ratio, roots_of_unity};

const GL_DEGREE: usize = 20;

fn gl_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLegendre::new(NonZeroUsize::new(GL_DEGREE).unwrap())
            .as_node_weight_pairs()
            .to_vec()
    })
}

fn gl_real(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * gl_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
}

fn gl_complex(a: f64, b: f64, f: &impl Fn(f64) -> Complex64) -> Complex64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    gl_rule()
        .iter()
        .map(|&(x, w)| f(mid + half * x) * w)
        .sum::<Complex64>()
        * half
}

/// `φ(x) = (sin πx / 2x)²`, continuous at 0.
pub fn phi(x: f64) -> f64 {
    if x == 0.0 {
        return PI * PI / 4.0;
    }
    let s = (PI * x).sin() / (2.0 * x);
    s * s
}

/// `φ̂(s) = (π²/4)·max(1 − |s|, 0)`.
pub fn phi_hat(s: f64) -> f64 {
    PI * PI / 4.0 * (1.0 - s.abs()).max(0.0)
}

/// `(φ(x), φ̂(x))`.
pub fn phi_pair(x: f64) -> (f64, f64) {
    (phi(x), phi_hat(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub x: f64,
    pub phi: f64,
    pub phi_hat_at: f64,
}

pub fn kernel_sample(x: f64) -> KernelSample {
    let (phi, phi_hat_at) = phi_pair(x);
    KernelSample { x, phi, phi_hat_at }
}

/// `∫_Y^∞ cos(ωy)/y² dy`, exact for `ω = 0` and to `O(ω⁻³Y⁻⁴)` otherwise.
fn cos_tail(omega: f64, y: f64) -> f64 {
    if omega == 0.0 {
        return 1.0 / y;
    }
    let (s, c) = (omega * y).sin_cos();
    -s / (omega * y * y) + 2.0 * c / (omega * omega * y * y * y)
}

/// `∫ φ(y)e(sy) dy` by Gauss–Legendre panels on `[0, 10⁴]` plus the
/// tail in closed form. Used to check [`phi_hat`].
pub fn phi_hat_quadrature(s: f64) -> f64 {
    const Y: f64 = 1e4;
    const PANEL: f64 = 0.5;
    let panels = (Y / PANEL) as usize;
    let parts: Vec<f64> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = i as f64 * PANEL;
            gl_real(a, a + PANEL, |y| phi(y) * (2.0 * PI * s * y).cos())
        })
        .collect();
    let body: f64 = parts.iter().sum();
    // φ(y)cos(2πsy) = [cos(2πsy) − ½cos(2π(1+s)y) − ½cos(2π(1−s)y)] / (8y²)
    let w = 2.0 * PI;
    let tail =
        (cos_tail(w * s, Y) - 0.5 * cos_tail(w * (1.0 + s), Y) - 0.5 * cos_tail(w * (1.0 - s), Y))
            / 8.0;
    2.0 * (body + tail)
}

/// `Σ_{d=1}^{c} e((kd² + ld)/c)`.
pub fn gauss_sum(k: i64, l: i64, c: u64) -> Result<Complex64> {
    if c == 0 {
        return Err(Error::Domain("Gauss sum modulus must be positive".into()));
    }
    if gcd_i64(k, c as i64) != 1 {
        return Err(Error::NotCoprime { a: k, b: c as i64 });
    }
    let ci = c as i128;
    let (k, l) = ((k as i128).rem_euclid(ci), (l as i128).rem_euclid(ci));
    Ok((1..=ci)
        .map(|d| e_ratio((k * (d * d % ci) + l * d) % ci, c))
        .sum())
}

/// `gauss_sum(k, l, c)` for every `l ∈ [0, c)` at once, by the same direct
/// summation against a table of `c`-th roots of unity.
pub fn gauss_sum_row(k: i64, c: u64) -> Result<Vec<Complex64>> {
    if c == 0 {
        return Err(Error::Domain("Gauss sum modulus must be positive".into()));
    }
    if gcd_i64(k, c as i64) != 1 {
        return Err(Error::NotCoprime { a: k, b: c as i64 });
    }
    let roots = roots_of_unity(c);
    let k = (k as i128).rem_euclid(c as i128) as u64;
    let mut row = vec![Complex64::new(0.0, 0.0); c as usize];
    for d in 1..=c {
        let dm = d % c;
        // index of (kd² + ld) mod c, advanced by d as l increases
        let mut idx = (k as u128 * (dm as u128 * dm as u128 % c as u128) % c as u128) as u64;
        for slot in row.iter_mut() {
            *slot += roots[idx as usize];
            idx += dm;
            if idx >= c {
                idx -= c;
            }
        }
    }
    Ok(row)
}

/// Truncation point for the direct side of [`poisson_residual`]: the tail
/// `Σ_{|n|>T} φ((n−shift)/scale)` is at most `scale²/(2(T−|shift|−1))`.
fn poisson_cutoff(scale: f64, shift: f64) -> i64 {
    (scale * scale * 5e6 + shift.abs() + 2.0).ceil() as i64
}

/// `|Σ_n f(n) − scale·Σ_n e(n·shift)·φ̂(n·scale)|` for
/// `f(x) = φ((x − shift)/scale)`.
pub fn poisson_residual(scale: f64, shift: f64) -> Result<f64> {
    if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
        return Err(Error::Domain(format!(
            "Poisson residual needs scale > 0, got {scale}"
        )));
    }
    let t = poisson_cutoff(scale, shift);
    const CHUNK: i64 = 1 << 16;
    let chunks: Vec<i64> = (-t..=t).step_by(CHUNK as usize).collect();
    let parts: Vec<f64> = chunks
        .par_iter()
        .map(|&start| {
            (start..(start + CHUNK).min(t + 1))
                .map(|n| phi((n as f64 - shift) / scale))
                .sum()
        })
        .collect();
    let direct: f64 = parts.iter().sum();
    // φ̂ vanishes once |n|·scale ≥ 1
    let m = (1.0 / scale).ceil() as i64;
    let dual: f64 = (-m..=m)
        .map(|n| e(n as f64 * shift).re * phi_hat(n as f64 * scale))
        .sum::<f64>()
        * scale;
    Ok((direct - dual).abs())
}

/// Largest number of panels [`oscillatory_e`] will integrate.
pub const QUADRATURE_BUDGET: usize = 1 << 22;

/// `E(j,l) = ∫_{Q₀}^{2Q₀} e(jyz − l√y/r*) dy` to absolute error `10⁻⁶·Q₀`.
pub fn oscillatory_e(j: i64, l: i64, r_star: u64, z: f64, q0: f64) -> Result<Complex64> {
    if !(q0 > 0.0 && q0.is_finite()) || r_star == 0 || !z.is_finite() {
        return Err(Error::Domain(format!(
            "E(j,l) needs Q₀ > 0, r* ≥ 1, finite z; got Q₀ = {q0}, r* = {r_star}, z = {z}"
        )));
    }
    if j == 0 && l == 0 {
        return Ok(Complex64::new(q0, 0.0));
    }
    let (jz, lr) = (j as f64 * z, l as f64 / r_star as f64);
    let integrand = move |y: f64| e(jz * y - lr * y.sqrt());
    // |F'(y)| ≤ |jz| + |l|/(2r*√y); each panel covers at most half a turn
    let max_slope = jz.abs() + lr.abs() / (2.0 * q0.sqrt());
    let width = if max_slope > 0.0 {
        (0.5 / max_slope).min(q0)
    } else {
        q0
    };
    let panels = (q0 / width).ceil() as usize;
    if panels > QUADRATURE_BUDGET {
        return Err(Error::QuadratureFailure {
            tol: 1e-6 * q0,
            budget: QUADRATURE_BUDGET,
        });
    }
    let h = q0 / panels as f64;
    let tol = 1e-6 * q0 / panels as f64;
    let parts: Vec<Option<Complex64>> = (0..panels)
        .into_par_iter()
        .map(|i| {
            let a = q0 + i as f64 * h;
            let b = if i + 1 == panels { 2.0 * q0 } else { a + h };
            adaptive_panel(&integrand, a, b, tol, 12)
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for p in parts {
        total += p.ok_or(Error::QuadratureFailure {
            tol: 1e-6 * q0,
            budget: QUADRATURE_BUDGET,
        })?;
    }
    Ok(total)
}

fn adaptive_panel(
    f: &impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Option<Complex64> {
    let whole = gl_complex(a, b, f);
    let mid = 0.5 * (a + b);
    let halves = gl_complex(a, mid, f) + gl_complex(mid, b, f);
    if (whole - halves).norm() <= tol {
        return Some(halves);
    }
    if depth == 0 {
        return None;
    }
    Some(
        adaptive_panel(f, a, mid, 0.5 * tol, depth - 1)?
            + adaptive_panel(f, mid, b, 0.5 * tol, depth - 1)?,
    )
}

/// `E(j,0)` from the antiderivative of `e(jzy)`.
pub fn oscillatory_e_closed(j: i64, z: f64, q0: f64) -> Complex64 {
    let jz = j as f64 * z;
    if jz == 0.0 {
        return Complex64::new(q0, 0.0);
    }
    (e(2.0 * jz * q0) - e(jz * q0)) / Complex64::new(0.0, 2.0 * PI * jz)
}

/// The three magnitude regimes for `E(j,l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VdcRegime {
    /// `l = 0, j ≠ 0`: shape `1/(|j|z)`.
    FirstDerivativeJ,
    /// `j = 0, l ≠ 0, r* = 1`: shape `Q₀^{1/2}/|l|`.
    FirstDerivativeL,
    /// `j, l ≠ 0`: shape `√r*·Q₀^{3/4}/√|l|`.
    SecondDerivative,
}

impl VdcRegime {
    pub const ALL: [VdcRegime; 3] = [
        VdcRegime::FirstDerivativeJ,
        VdcRegime::FirstDerivativeL,
        VdcRegime::SecondDerivative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VdcRegime::FirstDerivativeJ => "first_derivative_j",
            VdcRegime::FirstDerivativeL => "first_derivative_l",
            VdcRegime::SecondDerivative => "second_derivative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryInstance {
    pub j: i64,
    pub l: i64,
    pub r_star: u64,
    pub z: f64,
    pub q0: f64,
}

impl OscillatoryInstance {
    pub fn shape(&self, regime: VdcRegime) -> f64 {
        let (j, l) = (self.j.unsigned_abs() as f64, self.l.unsigned_abs() as f64);
        match regime {
            VdcRegime::FirstDerivativeJ => 1.0 / (j * self.z),
            VdcRegime::FirstDerivativeL => self.q0.sqrt() / l,
            VdcRegime::SecondDerivative => {
                (self.r_star as f64).sqrt() * self.q0.powf(0.75) / l.sqrt()
            }
        }
    }

    pub fn value(&self) -> Result<Complex64> {
        oscillatory_e(self.j, self.l, self.r_star, self.z, self.q0)
    }
}

/// Seeded random instances of one regime: `Q₀ ∈ [10, 10⁴]`,
/// `z ∈ [10⁻⁵, 10⁻²]` (log-uniform), `1 ≤ |j| ≤ 50`, `1 ≤ |l| ≤ 100`,
/// `r* ≤ 20`.
pub fn vdc_instances(regime: VdcRegime, seed: u64, count: usize) -> Vec<OscillatoryInstance> {
    let mut rng =
        ChaCha8Rng::seed_from_u64(seed ^ (regime as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    (0..count)
        .map(|_| {
            let q0 = 10f64.powf(rng.random_range(1.0..4.0));
            let z = 10f64.powf(rng.random_range(-5.0..-2.0));
            let sign = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { 1 } else { -1 };
            let j = sign(&mut rng) * rng.random_range(1..=50i64);
            let l = sign(&mut rng) * rng.random_range(1..=100i64);
            let r_star = rng.random_range(1..=20u64);
            match regime {
                VdcRegime::FirstDerivativeJ => OscillatoryInstance {
                    j,
                    l: 0,
                    r_star,
                    z,
                    q0,
                },
                VdcRegime::FirstDerivativeL => OscillatoryInstance {
                    j: 0,
                    l,
                    r_star: 1,
                    z,
                    q0,
                },
                VdcRegime::SecondDerivative => OscillatoryInstance {
                    j,
                    l,
                    r_star,
                    z,
                    q0,
                },
            }
        })
        .collect()
}

/// Largest `|E(j,l)| / shape` over the instances.
pub fn measure_vdc_constant(regime: VdcRegime, instances: &[OscillatoryInstance]) -> Result<f64> {
    let ratios: Vec<Result<f64>> = instances
        .iter()
        .map(|inst| Ok(inst.value()?.norm() / inst.shape(regime)))
        .collect();
    let mut best = 0.0f64;
    for r in ratios {
        best = best.max(r?);
    }
    Ok(best)
}
