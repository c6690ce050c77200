//! Sparse sets of moduli, their dilation subsets `𝒮_t = {q : tq ∈ 𝒮}`,
//! the square-moduli profile `(f_t, g_t)` and Farey fractions over a set.

use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};

/// Default cap on the number of Farey points materialized at once.
pub const DEFAULT_FAREY_LIMIT: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuliKind {
    Explicit,
    /// `{q² : q ≤ Q}`.
    SquaresUpTo(u64),
    /// Squares in `(Q₀, 2Q₀]`.
    SquaresInOctave(f64),
    PrimesUpTo(u64),
}

/// Finite strictly increasing set of moduli inside `(M, M+Q]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuliSet {
    elements: Vec<u64>,
    offset: f64,
    span: f64,
    kind: ModuliKind,
}

impl ModuliSet {
    /// An explicit set inside `(offset, offset + span]`. Empty sets are
    /// allowed here; [`build_moduli_set`] rejects them.
    pub fn explicit_in(elements: Vec<u64>, offset: f64, span: f64) -> Result<Self> {
        if !(offset >= 0.0 && span > 0.0 && offset.is_finite() && span.is_finite()) {
            return Err(Error::Domain(format!(
                "bad interval parameters M={offset}, Q={span}"
            )));
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "explicit moduli must be strictly increasing".into(),
            ));
        }
        if let Some(&q) = elements
            .iter()
            .find(|&&q| !(q as f64 > offset && q as f64 <= offset + span))
        {
            return Err(Error::Domain(format!(
                "modulus {q} outside ({offset}, {}]",
                offset + span
            )));
        }
        Ok(Self {
            elements,
            offset,
            span,
            kind: ModuliKind::Explicit,
        })
    }

    /// An explicit set with `M = 0` and `Q` equal to its largest element.
    pub fn explicit(elements: Vec<u64>) -> Result<Self> {
        let span = elements.last().copied().unwrap_or(1).max(1) as f64;
        Self::explicit_in(elements, 0.0, span)
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// `S = |𝒮|`.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `M`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `Q`, the length of the interval holding the set.
    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn kind(&self) -> &ModuliKind {
        &self.kind
    }

    pub fn contains(&self, q: u64) -> bool {
        self.elements.binary_search(&q).is_ok()
    }

    /// `Σ_{q∈𝒮} φ(q)`.
    pub fn farey_size(&self) -> u64 {
        self.elements.iter().map(|&q| factorize(q).totient()).sum()
    }
}

pub fn build_moduli_set(kind: &ModuliKind) -> Result<ModuliSet> {
    let set = match *kind {
        ModuliKind::Explicit => {
            return Err(Error::Config(
                "explicit moduli sets are built from a list; use ModuliSet::explicit".into(),
            ))
        }
        ModuliKind::SquaresUpTo(q) => {
            if q == 0 {
                return Err(Error::EmptySet("squares up to 0".into()));
            }
            ModuliSet {
                elements: (1..=q).map(|x| x * x).collect(),
                offset: 0.0,
                span: (q * q) as f64,
                kind: kind.clone(),
            }
        }
        ModuliKind::SquaresInOctave(q0) => {
            if !(q0 > 0.0 && q0.is_finite()) {
                return Err(Error::Domain(format!("octave base {q0} must be positive")));
            }
            let mut x = (q0.sqrt().floor() as u64).saturating_sub(1);
            while ((x * x) as f64) <= q0 {
                x += 1;
            }
            let mut elements = Vec::new();
            while ((x * x) as f64) <= 2.0 * q0 {
                elements.push(x * x);
                x += 1;
            }
            ModuliSet {
                elements,
                offset: q0,
                span: q0,
                kind: kind.clone(),
            }
        }
        ModuliKind::PrimesUpTo(q) => ModuliSet {
            elements: primes_up_to(q),
            offset: 0.0,
            span: q.max(1) as f64,
            kind: kind.clone(),
        },
    };
    if set.is_empty() {
        return Err(Error::EmptySet(format!("{kind:?}")));
    }
    Ok(set)
}

/// Loads an explicit set from text: one integer per line, strictly
/// increasing.
pub fn read_moduli_file(path: &Path) -> Result<ModuliSet> {
    let text = fs::read_to_string(path)?;
    let mut elements = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let q: u64 = line.parse().map_err(|_| Error::FileFormat {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("`{line}` is not a positive integer"),
        })?;
        if q == 0 || elements.last().is_some_and(|&last| last >= q) {
            return Err(Error::FileFormat {
                path: path.to_path_buf(),
                line: i + 1,
                msg: "moduli must be positive and strictly increasing".into(),
            });
        }
        elements.push(q);
    }
    if elements.is_empty() {
        return Err(Error::EmptySet(path.display().to_string()));
    }
    ModuliSet::explicit(elements)
}

pub fn primes_up_to(q: u64) -> Vec<u64> {
    if q < 2 {
        return Vec::new();
    }
    let n = q as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            for j in (i * i..=n).step_by(i) {
                composite[j] = true;
            }
        }
        i += 1;
    }
    (2..=n)
        .filter(|&i| !composite[i])
        .map(|i| i as u64)
        .collect()
}

/// `𝒮_t = {q : tq ∈ 𝒮}` inside `(M/t, (M+Q)/t]`.
pub fn derive_subset(set: &ModuliSet, t: u64) -> ModuliSet {
    assert!(t >= 1, "derive_subset requires t >= 1");
    if t == 1 {
        return set.clone();
    }
    ModuliSet {
        elements: set
            .elements
            .iter()
            .filter(|&&q| q % t == 0)
            .map(|&q| q / t)
            .collect(),
        offset: set.offset / t as f64,
        span: set.span / t as f64,
        kind: ModuliKind::Explicit,
    }
}

/// `(f_t, g_t)`: `f_t` is the least integer with `t | q² ⟺ f_t | q`, and
/// `g_t = f_t²/t`.
pub fn square_divisor_profile(t: u64) -> (u64, u64) {
    assert!(t >= 1);
    let mut f = 1u64;
    let mut g = 1u64;
    for &(p, v) in factorize(t).prime_powers() {
        let u = if v % 2 == 0 { v } else { v + 1 };
        f *= p.pow(u / 2);
        g *= p.pow(u - v);
    }
    (f, g)
}

/// One reduced fraction `a/q` with `q ∈ 𝒮`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FareyEntry {
    pub a: u64,
    pub q: u64,
    pub value: f64,
}

impl FareyEntry {
    fn cmp_exact(&self, other: &Self) -> Ordering {
        (self.a as u128 * other.q as u128).cmp(&(other.a as u128 * self.q as u128))
    }
}

/// Reduced fractions `a/q`, `1 ≤ a ≤ q`, over a moduli set, sorted by value.
#[derive(Debug, Clone, PartialEq)]
pub struct FareyList {
    entries: Vec<FareyEntry>,
}

impl FareyList {
    pub fn entries(&self) -> &[FareyEntry] {
        &self.entries
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.value)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn enumerate_farey(set: &ModuliSet) -> Result<FareyList> {
    enumerate_farey_with_limit(set, DEFAULT_FAREY_LIMIT)
}

pub fn enumerate_farey_with_limit(set: &ModuliSet, limit: u64) -> Result<FareyList> {
    if set.is_empty() {
        return Err(Error::EmptySet(
            "cannot enumerate Farey fractions of an empty set".into(),
        ));
    }
    let needed = set.farey_size();
    if needed > limit {
        return Err(Error::CapacityExceeded { needed, limit });
    }
    let per_modulus: Vec<Vec<FareyEntry>> = set
        .elements
        .par_iter()
        .map(|&q| {
            (1..=q)
                .filter(|&a| gcd(a, q) == 1)
                .map(|a| FareyEntry {
                    a,
                    q,
                    value: a as f64 / q as f64,
                })
                .collect()
        })
        .collect();
    let mut entries: Vec<FareyEntry> = per_modulus.into_iter().flatten().collect();
    // Distinct reduced fractions never compare equal, so the order is total
    // and independent of the sort's stability.
    entries.par_sort_unstable_by(FareyEntry::cmp_exact);
    Ok(FareyList { entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_examples() {
        let s = build_moduli_set(&ModuliKind::SquaresUpTo(3)).unwrap();
        assert_eq!(s.elements(), &[1, 4, 9]);
        assert_eq!((s.offset(), s.span()), (0.0, 9.0));
        let s = build_moduli_set(&ModuliKind::SquaresInOctave(5.0)).unwrap();
        assert_eq!(s.elements(), &[9]);
        assert_eq!((s.offset(), s.span()), (5.0, 5.0));
        let s = build_moduli_set(&ModuliKind::PrimesUpTo(10)).unwrap();
        assert_eq!(s.elements(), &[2, 3, 5, 7]);
    }

    #[test]
    fn octave_edges() {
        // (8, 16] holds 9 and 16; 16 = 2·8 is included
        let s = build_moduli_set(&ModuliKind::SquaresInOctave(8.0)).unwrap();
        assert_eq!(s.elements(), &[9, 16]);
        // (4, 8] holds no square
        assert!(matches!(
            build_moduli_set(&ModuliKind::SquaresInOctave(4.0)),
            Err(Error::EmptySet(_))
        ));
        assert!(matches!(
            build_moduli_set(&ModuliKind::PrimesUpTo(1)),
            Err(Error::EmptySet(_))
        ));
    }

    #[test]
    fn explicit_validation() {
        assert!(ModuliSet::explicit(vec![3, 2]).is_err());
        assert!(ModuliSet::explicit_in(vec![5], 5.0, 3.0).is_err());
        let s = ModuliSet::explicit(vec![2, 3, 10]).unwrap();
        assert_eq!(s.span(), 10.0);
    }

    #[test]
    fn subset_examples() {
        let s = build_moduli_set(&ModuliKind::SquaresUpTo(3)).unwrap();
        let s2 = derive_subset(&s, 2);
        assert_eq!(s2.elements(), &[2]);
        assert_eq!((s2.offset(), s2.span()), (0.0, 4.5));
        assert_eq!(derive_subset(&s, 1), s);
        assert!(derive_subset(&s, 5).is_empty());
    }

    #[test]
    fn profile_examples() {
        assert_eq!(square_divisor_profile(12), (6, 3));
        assert_eq!(square_divisor_profile(1), (1, 1));
        assert_eq!(square_divisor_profile(8), (4, 2));
        assert_eq!(square_divisor_profile(36), (6, 1));
    }

    #[test]
    fn profile_characterizes_divisibility() {
        for t in 1..200u64 {
            let (f, g) = square_divisor_profile(t);
            assert_eq!(f * f, g * t);
            for q1 in 1..300u64 {
                assert_eq!((q1 * q1) % t == 0, q1 % f == 0, "t={t} q1={q1}");
            }
        }
    }

    #[test]
    fn farey_examples() {
        let f = enumerate_farey(&ModuliSet::explicit(vec![1]).unwrap()).unwrap();
        assert_eq!(
            f.entries().iter().map(|e| (e.a, e.q)).collect::<Vec<_>>(),
            vec![(1, 1)]
        );
        let f = enumerate_farey(&ModuliSet::explicit(vec![4]).unwrap()).unwrap();
        assert_eq!(f.values().collect::<Vec<_>>(), vec![0.25, 0.75]);
        let f = enumerate_farey(&ModuliSet::explicit(vec![2, 3]).unwrap()).unwrap();
        let fr: Vec<_> = f.entries().iter().map(|e| (e.a, e.q)).collect();
        assert_eq!(fr, vec![(1, 3), (1, 2), (2, 3)]);
    }

    #[test]
    fn farey_capacity_and_empty() {
        let s = build_moduli_set(&ModuliKind::SquaresUpTo(10)).unwrap();
        assert!(matches!(
            enumerate_farey_with_limit(&s, 10),
            Err(Error::CapacityExceeded { limit: 10, .. })
        ));
        let empty = ModuliSet::explicit(vec![]).unwrap();
        assert!(matches!(enumerate_farey(&empty), Err(Error::EmptySet(_))));
    }

    #[test]
    fn moduli_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.txt");
        fs::write(&p, "2\n5\n11\n").unwrap();
        assert_eq!(read_moduli_file(&p).unwrap().elements(), &[2, 5, 11]);
        fs::write(&p, "2\n2\n").unwrap();
        assert!(matches!(
            read_moduli_file(&p),
            Err(Error::FileFormat { line: 2, .. })
        ));
    }
}
