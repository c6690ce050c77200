//! Coefficient sequences `(a_n)` and the trigonometric polynomial
//! `S(α) = Σ_{n≤N} a_n e(nα)`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::phase::{self, e};

/// Immutable coefficient vector `a_1..a_N` with its cached energy
/// `Z = Σ|a_n|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    values: Vec<Complex64>,
    energy: f64,
}

impl CoefficientSequence {
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("a coefficient sequence needs N >= 1".into()));
        }
        let energy = values.iter().map(|a| a.norm_sqr()).sum();
        Ok(Self { values, energy })
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficients; `values()[n - 1]` is `a_n`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `Z = Σ|a_n|²`.
    pub fn energy(&self) -> f64 {
        self.energy
    }
}

/// Test-sequence recipes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Ones,
    Delta(u64),
    RandomSigns(u64),
    RandomPhases(u64),
    /// `a_n = e(−nβ)`, which makes `|S(β)| = N`.
    Focused(f64),
    FromFile(PathBuf),
}

impl SequenceKind {
    /// Short label used in report rows.
    pub fn label(&self) -> String {
        match self {
            Self::Ones => "ones".into(),
            Self::Delta(n0) => format!("delta:{n0}"),
            Self::RandomSigns(_) => "random_signs".into(),
            Self::RandomPhases(_) => "random_phases".into(),
            Self::Focused(b) => format!("focused:{b}"),
            Self::FromFile(p) => format!("file:{}", p.display()),
        }
    }

    /// Parses `ones`, `delta:<n0>`, `random_signs`, `random_phases`,
    /// `focused:<beta>` or `file:<path>`; random kinds take `seed`.
    pub fn parse(s: &str, seed: u64) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Config(format!("unrecognised sequence spec `{s}`"));
        let kind = match (head.trim(), arg) {
            ("ones", None) => Self::Ones,
            ("delta", Some(a)) => Self::Delta(a.trim().parse().map_err(|_| bad())?),
            ("random_signs", None) => Self::RandomSigns(seed),
            ("random_signs", Some(a)) => Self::RandomSigns(a.trim().parse().map_err(|_| bad())?),
            ("random_phases", None) => Self::RandomPhases(seed),
            ("random_phases", Some(a)) => Self::RandomPhases(a.trim().parse().map_err(|_| bad())?),
            ("focused", Some(a)) => Self::Focused(parse_real(a).ok_or_else(bad)?),
            ("file", Some(a)) => Self::FromFile(PathBuf::from(a)),
            _ => return Err(bad()),
        };
        Ok(kind)
    }
}

/// Accepts decimal reals and simple fractions such as `1/4`.
pub(crate) fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: f64 = n.trim().parse().ok()?;
        let d: f64 = d.trim().parse().ok()?;
        return (d != 0.0).then_some(n / d);
    }
    f64::from_str(s).ok()
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn make_sequence(kind: &SequenceKind, n: usize) -> Result<CoefficientSequence> {
    if n == 0 && !matches!(kind, SequenceKind::FromFile(_)) {
        return Err(Error::Domain("N must be positive".into()));
    }
    let values = match kind {
        SequenceKind::Ones => vec![Complex64::new(1.0, 0.0); n],
        SequenceKind::Delta(n0) => {
            if *n0 < 1 || *n0 > n as u64 {
                return Err(Error::OutOfRange {
                    index: *n0,
                    len: n as u64,
                });
            }
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[*n0 as usize - 1] = Complex64::new(1.0, 0.0);
            v
        }
        SequenceKind::RandomSigns(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n)
                .map(|_| Complex64::new(if rng.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0))
                .collect()
        }
        SequenceKind::RandomPhases(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..n).map(|_| e(rng.random::<f64>())).collect()
        }
        SequenceKind::Focused(beta) => {
            if !(0.0..1.0).contains(beta) {
                return Err(Error::Domain(format!("focus point {beta} not in [0, 1)")));
            }
            (1..=n as u64)
                .map(|k| e(-phase::frac_mul(k as f64, *beta)))
                .collect()
        }
        SequenceKind::FromFile(path) => return read_sequence_file(path),
    };
    CoefficientSequence::from_values(values)
}

/// Reads the text format: one `re im` pair per line, line `n` holding `a_n`.
pub fn read_sequence_file(path: &Path) -> Result<CoefficientSequence> {
    let text = fs::read_to_string(path)?;
    let fmt_err = |line: usize, msg: &str| Error::FileFormat {
        path: path.to_path_buf(),
        line,
        msg: msg.to_string(),
    };
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let mut parts = line.split_whitespace();
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => return Err(fmt_err(i + 1, "expected `<re> <im>`")),
        };
        let re: f64 = re.parse().map_err(|_| fmt_err(i + 1, "bad real part"))?;
        let im: f64 = im
            .parse()
            .map_err(|_| fmt_err(i + 1, "bad imaginary part"))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(fmt_err(i + 1, "non-finite coefficient"));
        }
        values.push(Complex64::new(re, im));
    }
    if values.is_empty() {
        return Err(fmt_err(0, "file holds no coefficients"));
    }
    CoefficientSequence::from_values(values)
}

pub fn write_sequence_file(seq: &CoefficientSequence, path: &Path) -> Result<()> {
    let mut out = String::with_capacity(seq.len() * 48);
    for a in seq.values() {
        out.push_str(&format!("{:e} {:e}\n", a.re, a.im));
    }
    fs::write(path, out)?;
    Ok(())
}

/// `Z = Σ|a_n|²`.
pub fn z_norm(seq: &CoefficientSequence) -> f64 {
    seq.energy()
}

/// Direct evaluation of `S(α)`. The argument is reduced modulo 1 and each
/// phase `nα mod 1` is formed with a fused multiply-add.
pub fn eval_exp_sum(seq: &CoefficientSequence, alpha: f64) -> Complex64 {
    let alpha = alpha.rem_euclid(1.0);
    seq.values
        .iter()
        .enumerate()
        .map(|(i, a)| a * e(phase::frac_mul((i + 1) as f64, alpha)))
        .sum()
}

/// `S(a/q)` for all numerators of one modulus, by residue bucketing.
///
/// The coefficients are first folded into `b_j = Σ_{n ≡ j (q)} a_n`, so each
/// fraction costs `min(q, N)` multiplications against an exact table of
/// `e(m/q)`.
#[derive(Debug, Clone)]
pub struct ModulusEvaluator {
    q: u64,
    buckets: Vec<(u64, Complex64)>,
    roots: Vec<Complex64>,
}

impl ModulusEvaluator {
    pub fn new(seq: &CoefficientSequence, q: u64) -> Self {
        assert!(q >= 1);
        let buckets = if q as usize >= seq.len() {
            seq.values
                .iter()
                .enumerate()
                .map(|(i, &a)| ((i as u64 + 1) % q, a))
                .collect()
        } else {
            let mut b = vec![Complex64::new(0.0, 0.0); q as usize];
            for (i, &a) in seq.values.iter().enumerate() {
                b[(i + 1) % q as usize] += a;
            }
            b.into_iter()
                .enumerate()
                .map(|(j, v)| (j as u64, v))
                .collect()
        };
        Self {
            q,
            buckets,
            roots: phase::roots_of_unity(q),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `S(a/q)`.
    pub fn eval(&self, a: u64) -> Complex64 {
        let a = a % self.q;
        self.buckets
            .iter()
            .map(|&(j, b)| b * self.roots[crate::arith::mul_mod(j, a, self.q) as usize])
            .sum()
    }

    /// `Σ |S(a/q)|²` over `1 ≤ a ≤ q`, restricted to `gcd(a, q) = 1` when
    /// `reduced` is set. Summed in increasing `a`.
    pub fn energy(&self, reduced: bool) -> f64 {
        (1..=self.q)
            .filter(|&a| !reduced || gcd(a, self.q) == 1)
            .map(|a| self.eval(a).norm_sqr())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn factory_examples() {
        let ones = make_sequence(&SequenceKind::Ones, 4).unwrap();
        assert_eq!(ones.values(), &[Complex64::new(1.0, 0.0); 4]);
        assert_eq!(z_norm(&ones), 4.0);

        let d = make_sequence(&SequenceKind::Delta(3), 5).unwrap();
        assert_eq!(d.values()[2], Complex64::new(1.0, 0.0));
        assert_eq!(z_norm(&d), 1.0);
        assert_eq!(
            z_norm(&make_sequence(&SequenceKind::Delta(2), 7).unwrap()),
            1.0
        );

        let f = make_sequence(&SequenceKind::Focused(0.25), 2).unwrap();
        assert!(close(f.values()[0], Complex64::new(0.0, -1.0), 1e-15));
        assert!(close(f.values()[1], Complex64::new(-1.0, 0.0), 1e-15));

        let s = make_sequence(&SequenceKind::RandomSigns(9), 100).unwrap();
        assert_eq!(z_norm(&s), 100.0);
    }

    #[test]
    fn factory_errors() {
        assert!(matches!(
            make_sequence(&SequenceKind::Delta(6), 5),
            Err(Error::OutOfRange { index: 6, len: 5 })
        ));
        assert!(make_sequence(&SequenceKind::Delta(0), 5).is_err());
        assert!(make_sequence(&SequenceKind::Focused(1.0), 5).is_err());
    }

    #[test]
    fn exp_sum_examples() {
        let ones = make_sequence(&SequenceKind::Ones, 4).unwrap();
        assert!(close(
            eval_exp_sum(&ones, 0.0),
            Complex64::new(4.0, 0.0),
            1e-14
        ));
        assert!(close(
            eval_exp_sum(&ones, 0.5),
            Complex64::new(0.0, 0.0),
            1e-14
        ));
        let d = make_sequence(&SequenceKind::Delta(3), 5).unwrap();
        assert!(close(
            eval_exp_sum(&d, 0.25),
            Complex64::new(0.0, -1.0),
            1e-14
        ));
    }

    #[test]
    fn bucketed_matches_direct() {
        let seq = make_sequence(&SequenceKind::RandomPhases(3), 57).unwrap();
        for q in [1u64, 2, 7, 30, 57, 91] {
            let ev = ModulusEvaluator::new(&seq, q);
            for a in 1..=q {
                let direct = eval_exp_sum(&seq, a as f64 / q as f64);
                assert!(close(ev.eval(a), direct, 1e-10), "q={q} a={a}");
            }
        }
    }

    #[test]
    fn file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("seq.txt");
        let seq = make_sequence(&SequenceKind::RandomPhases(1), 10).unwrap();
        write_sequence_file(&seq, &path).unwrap();
        let back = make_sequence(&SequenceKind::FromFile(path.clone()), 0).unwrap();
        assert_eq!(back, seq);

        fs::write(&path, "1 0\n0.5\n").unwrap();
        match read_sequence_file(&path) {
            Err(Error::FileFormat { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        fs::write(&path, "1 zero\n").unwrap();
        assert!(read_sequence_file(&path).is_err());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(SequenceKind::parse("ones", 0).unwrap(), SequenceKind::Ones);
        assert_eq!(
            SequenceKind::parse("delta:3", 0).unwrap(),
            SequenceKind::Delta(3)
        );
        assert_eq!(
            SequenceKind::parse("random_phases", 11).unwrap(),
            SequenceKind::RandomPhases(11)
        );
        assert_eq!(
            SequenceKind::parse("focused:1/4", 0).unwrap(),
            SequenceKind::Focused(0.25)
        );
        assert!(SequenceKind::parse("nope", 0).is_err());
    }
}
