//! Product-operator basis: labeled terms such as `4I1xI2zI3z`, decomposition
//! of density matrices over them and reconstruction.
//!
//! A term with `q` non-identity factors is `2^(q−1) · Π_k I^k_{axis_k}`, so that
//! every basis element satisfies `Tr(B·B) = 2^(n−2)`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{c, cr, Real, C};
use crate::spin::{Axis, MAX_SPINS};

/// Coefficients with magnitude at or below this are not reported.
pub const COEFFICIENT_CUTOFF: f64 = 1e-12;

/// One product-operator basis element with a real coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm<T> {
    axes: Vec<Option<Axis>>,
    pub coefficient: T,
}

impl<T: Real> ProductTerm<T> {
    /// `axes[k-1]` is the factor on spin k; `None` is the identity.
    pub fn new(axes: Vec<Option<Axis>>, coefficient: T) -> Result<Self> {
        if axes.is_empty() || axes.len() > MAX_SPINS {
            return Err(Error::domain(format!(
                "product term needs 1..={MAX_SPINS} spins"
            )));
        }
        if axes.iter().all(Option::is_none) {
            return Err(Error::domain(
                "the identity is carried by Decomposition::identity_part",
            ));
        }
        Ok(ProductTerm { axes, coefficient })
    }

    /// Builds from `(spin, axis)` factors, 1-based.
    pub fn from_factors(n: usize, factors: &[(usize, Axis)], coefficient: T) -> Result<Self> {
        let mut axes = vec![None; n];
        for &(k, a) in factors {
            if k == 0 || k > n {
                return Err(Error::domain(format!("spin index {k} outside 1..={n}")));
            }
            if axes[k - 1].replace(a).is_some() {
                return Err(Error::domain(format!("spin {k} appears twice")));
            }
        }
        Self::new(axes, coefficient)
    }

    /// Parses a canonical label such as `"2I1zI3x"` for an `n`-spin system.
    pub fn parse(label: &str, n: usize, coefficient: T) -> Result<Self> {
        let bad = |why: &str| Error::domain(format!("unknown label '{label}': {why}"));
        let s = label.trim();
        let digits: String = s.chars().take_while(|ch| ch.is_ascii_digit()).collect();
        let prefactor: Option<u64> = if digits.is_empty() {
            None
        } else {
            Some(digits.parse().map_err(|_| bad("bad prefactor"))?)
        };
        let mut rest = &s[digits.len()..];
        let mut factors = Vec::new();
        while !rest.is_empty() {
            rest = rest.strip_prefix('I').ok_or_else(|| bad("expected 'I'"))?;
            let kd: String = rest.chars().take_while(|ch| ch.is_ascii_digit()).collect();
            if kd.is_empty() {
                return Err(bad("missing spin index"));
            }
            let k: usize = kd.parse().map_err(|_| bad("bad spin index"))?;
            rest = &rest[kd.len()..];
            let ax = rest
                .chars()
                .next()
                .and_then(Axis::from_char)
                .ok_or_else(|| bad("missing axis"))?;
            rest = &rest[1..];
            factors.push((k, ax));
        }
        if factors.is_empty() {
            return Err(bad("no factors"));
        }
        let term = Self::from_factors(n, &factors, coefficient).map_err(|e| bad(&e.to_string()))?;
        let expected = 1u64 << (term.order() - 1);
        match prefactor {
            Some(p) if p != expected => Err(bad(&format!("prefactor must be {expected}"))),
            None if expected != 1 => Err(bad(&format!("prefactor {expected} is required"))),
            _ => Ok(term),
        }
    }

    pub fn axes(&self) -> &[Option<Axis>] {
        &self.axes
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    /// Number of non-identity factors.
    pub fn order(&self) -> usize {
        self.axes.iter().filter(|a| a.is_some()).count()
    }

    /// 2^(q−1).
    pub fn prefactor(&self) -> u64 {
        1 << (self.order() - 1)
    }

    /// `(spin, axis)` for each non-identity factor, ascending spin.
    pub fn factors(&self) -> Vec<(usize, Axis)> {
        self.axes
            .iter()
            .enumerate()
            .filter_map(|(i, a)| a.map(|a| (i + 1, a)))
            .collect()
    }

    /// Axis on spin `k` (1-based), `None` for the identity.
    pub fn axis_of(&self, k: usize) -> Option<Axis> {
        self.axes[k - 1]
    }

    pub fn label(&self) -> String {
        let mut s = String::new();
        let p = self.prefactor();
        if p != 1 {
            s.push_str(&p.to_string());
        }
        for (k, a) in self.factors() {
            s.push_str(&format!("I{k}{a}"));
        }
        s
    }

    /// Same term with another coefficient.
    pub fn with_coefficient(&self, coefficient: T) -> Self {
        ProductTerm {
            axes: self.axes.clone(),
            coefficient,
        }
    }

    /// Canonical ordering: by order q, then involved spins, then axes (x<y<z).
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let key = |t: &Self| {
            let f = t.factors();
            (
                t.order(),
                f.iter().map(|x| x.0).collect::<Vec<_>>(),
                f.iter().map(|x| x.1).collect::<Vec<_>>(),
            )
        };
        key(self).cmp(&key(other))
    }

    /// The unit-coefficient basis operator `2^(q−1) Π I^k_a`.
    pub fn operator(&self) -> Operator<T> {
        let n = self.n();
        let dim = 1usize << n;
        let scale = T::lit(self.prefactor() as f64) / T::lit((1u64 << self.order()) as f64);
        let mut m = Operator::zeros(dim);
        for i in 0..dim {
            let (j, ph) = pauli_string_entry::<T>(&self.axes, i);
            m[(i, j)] = ph * cr(scale);
        }
        m
    }
}

impl<T: Real> fmt::Display for ProductTerm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.label(), self.coefficient)
    }
}

/// Row `i` of the Pauli string `⊗ σ_{a_k}` has one nonzero entry; returns its
/// column and value.
pub(crate) fn pauli_string_entry<T: Real>(axes: &[Option<Axis>], i: usize) -> (usize, C<T>) {
    let n = axes.len();
    let mut j = i;
    let mut ph = C::<T>::one();
    for (idx, a) in axes.iter().enumerate() {
        let shift = n - 1 - idx;
        let bit = (i >> shift) & 1;
        match a {
            None => {}
            Some(Axis::X) => j ^= 1 << shift,
            Some(Axis::Y) => {
                j ^= 1 << shift;
                // σy[0][1] = −i, σy[1][0] = +i
                ph *= if bit == 0 {
                    c(T::zero(), -T::one())
                } else {
                    c(T::zero(), T::one())
                };
            }
            Some(Axis::Z) if bit == 1 => ph = -ph,
            Some(Axis::Z) => {}
        }
    }
    (j, ph)
}

/// All `4^n − 1` non-identity basis elements (unit coefficients), canonical order.
pub fn basis<T: Real>(n: usize) -> Result<Vec<ProductTerm<T>>> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::domain(format!("basis needs 1..={MAX_SPINS} spins, got {n}")));
    }
    let total = 1usize << (2 * n);
    let mut out = Vec::with_capacity(total - 1);
    for code in 1..total {
        let axes = (0..n)
            .map(|k| match (code >> (2 * (n - 1 - k))) & 3 {
                0 => None,
                1 => Some(Axis::X),
                2 => Some(Axis::Y),
                _ => Some(Axis::Z),
            })
            .collect();
        out.push(ProductTerm {
            axes,
            coefficient: T::one(),
        });
    }
    out.sort_by(|a, b| a.canonical_cmp(b));
    Ok(out)
}

/// Density matrix expanded as `(identity_part / 2^n)·I + Σ c_B · B`.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub n: usize,
    pub identity_part: T,
    pub terms: Vec<ProductTerm<T>>,
}

impl<T: Real> Decomposition<T> {
    /// Builds from `(label, coefficient)` pairs; labels must be valid for `n`.
    pub fn from_labels(n: usize, identity_part: T, terms: &[(&str, T)]) -> Result<Self> {
        let mut out = Vec::with_capacity(terms.len());
        for (label, coef) in terms {
            let t = ProductTerm::parse(label, n, *coef)?;
            if out.iter().any(|o: &ProductTerm<T>| o.axes == t.axes) {
                return Err(Error::domain(format!("duplicate term '{label}'")));
            }
            out.push(t);
        }
        out.sort_by(|a, b| a.canonical_cmp(b));
        Ok(Decomposition {
            n,
            identity_part,
            terms: out,
        })
    }

    pub fn coefficient(&self, label: &str) -> Option<T> {
        self.terms
            .iter()
            .find(|t| t.label() == label)
            .map(|t| t.coefficient)
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(ProductTerm::label).collect()
    }

    /// Multiplies every coefficient, including the identity part.
    pub fn scaled(&self, s: T) -> Self {
        Decomposition {
            n: self.n,
            identity_part: self.identity_part * s,
            terms: self
                .terms
                .iter()
                .map(|t| t.with_coefficient(t.coefficient * s))
                .collect(),
        }
    }
}

/// Expands a Hermitian `2^n × 2^n` operator over the product-operator basis.
pub fn decompose<T: Real>(rho: &Operator<T>) -> Result<Decomposition<T>> {
    let n = rho
        .spin_count()
        .filter(|&n| (1..=MAX_SPINS).contains(&n))
        .ok_or_else(|| Error::domain(format!("dimension {} is not 2^n", rho.dim())))?;
    if !rho.is_hermitian(T::tol(crate::eigen::HERMITIAN_TOL)) {
        return Err(Error::domain("decompose requires a Hermitian operator"));
    }
    let dim = rho.dim();
    let norm = T::lit((1u64 << n) as f64) / T::lit(4.0);
    let cutoff = T::lit(COEFFICIENT_CUTOFF);
    let mut terms = Vec::new();
    for mut b in basis::<T>(n)? {
        // Tr(B ρ) with B = (2^(q−1)/2^q)·P
        let mut acc = C::<T>::zero();
        for i in 0..dim {
            let (j, ph) = pauli_string_entry::<T>(&b.axes, i);
            acc += ph * rho[(j, i)];
        }
        let coef = acc.re * T::half() / norm;
        if coef.abs() > cutoff {
            b.coefficient = coef;
            terms.push(b);
        }
    }
    Ok(Decomposition {
        n,
        identity_part: rho.trace().re,
        terms,
    })
}

/// Inverse of [`decompose`].
pub fn compose<T: Real>(d: &Decomposition<T>) -> Result<Operator<T>> {
    let n = d.n;
    if n == 0 || n > MAX_SPINS {
        return Err(Error::domain(format!("spin count {n} outside 1..={MAX_SPINS}")));
    }
    let dim = 1usize << n;
    let mut m = Operator::identity(dim).scale_real(d.identity_part / T::lit(dim as f64));
    for t in &d.terms {
        if t.n() != n {
            return Err(Error::domain(format!(
                "term '{}' is for {} spins, decomposition has {n}",
                t.label(),
                t.n()
            )));
        }
        let scale = t.coefficient * T::lit(t.prefactor() as f64)
            / T::lit((1u64 << t.order()) as f64);
        for i in 0..dim {
            let (j, ph) = pauli_string_entry::<T>(&t.axes, i);
            m[(i, j)] += ph * cr(scale);
        }
    }
    Ok(m)
}

impl<T: Real> fmt::Display for Decomposition<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "identity: {}", self.identity_part)?;
        for t in &self.terms {
            writeln!(f, "term {t}")?;
        }
        Ok(())
    }
}
