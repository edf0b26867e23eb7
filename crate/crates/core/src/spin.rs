//! Single-spin operators embedded in an n-spin Hilbert space, and the spin
//! system description.
//!
//! # Basis convention
//!
//! Spin 1 is the most significant bit. `|0⟩` is the σ_z = +1 ("up", m = +½)
//! state. The computational basis index of `|b1 b2 … bn⟩` is
//! `Σ b_k · 2^(n−k)`, so for three spins `|b1 b2 b3⟩ ↦ 4·b1 + 2·b2 + b3`.
//! Spin indices are 1-based throughout the public API.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{c, cr, Real, C};

/// Largest supported spin count (2^10 = 1024-dimensional operators).
pub const MAX_SPINS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn as_char(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn from_char(ch: char) -> Option<Axis> {
        match ch.to_ascii_lowercase() {
            'x' => Some(Axis::X),
            'y' => Some(Axis::Y),
            'z' => Some(Axis::Z),
            _ => None,
        }
    }

    /// 2×2 Pauli matrix for this axis.
    pub fn pauli_2x2<T: Real>(self) -> Operator<T> {
        let (o, z) = (C::<T>::one(), C::<T>::zero());
        let i = c(T::zero(), T::one());
        let rows = match self {
            Axis::X => vec![vec![z, o], vec![o, z]],
            Axis::Y => vec![vec![z, -i], vec![i, z]],
            Axis::Z => vec![vec![o, z], vec![z, -o]],
        };
        Operator::from_rows(&rows).unwrap()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next().and_then(Axis::from_char), chars.next()) {
            (Some(a), None) => Ok(a),
            _ => Err(Error::domain(format!("unknown axis '{s}'"))),
        }
    }
}

pub(crate) fn check_spin(k: usize, n: usize) -> Result<()> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::domain(format!(
            "spin count {n} outside 1..={MAX_SPINS}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::domain(format!("spin index {k} outside 1..={n}")));
    }
    Ok(())
}

/// Embeds a 2×2 single-spin matrix at spin `k` of `n`.
pub fn embed<T: Real>(single: &Operator<T>, k: usize, n: usize) -> Result<Operator<T>> {
    check_spin(k, n)?;
    if single.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: single.dim(),
        });
    }
    let left = Operator::identity(1 << (k - 1));
    let right = Operator::identity(1 << (n - k));
    Ok(left.kron(single).kron(&right))
}

/// σ_axis on spin `k` of `n`: `I ⊗ … ⊗ σ ⊗ … ⊗ I`.
pub fn pauli<T: Real>(axis: Axis, k: usize, n: usize) -> Result<Operator<T>> {
    embed(&axis.pauli_2x2(), k, n)
}

/// I^k_axis = σ^k_axis / 2.
pub fn angular_momentum<T: Real>(axis: Axis, k: usize, n: usize) -> Result<Operator<T>> {
    Ok(pauli(axis, k, n)?.scale_real(T::half()))
}

/// Projector of spin `k` onto `|state⟩` (state 0 or 1).
pub fn projector<T: Real>(k: usize, state: u8, n: usize) -> Result<Operator<T>> {
    let (o, z) = (C::<T>::one(), C::<T>::zero());
    let p = if state == 0 {
        Operator::diagonal(&[o, z])
    } else {
        Operator::diagonal(&[z, o])
    };
    embed(&p, k, n)
}

/// Tr(a† · b).
pub fn trace_inner<T: Real>(a: &Operator<T>, b: &Operator<T>) -> Result<C<T>> {
    a.check_dim(b)?;
    let n = a.dim();
    let mut acc = C::zero();
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    Ok(acc)
}

/// Bit of spin `k` (1-based, MSB first) in basis index `index`.
#[inline]
pub fn spin_bit(index: usize, k: usize, n: usize) -> u8 {
    ((index >> (n - k)) & 1) as u8
}

/// Magnetic quantum number of spin `k` in basis state `index`: +½ for bit 0.
#[inline]
pub fn spin_m<T: Real>(index: usize, k: usize, n: usize) -> T {
    if spin_bit(index, k, n) == 0 {
        T::half()
    } else {
        -T::half()
    }
}

/// Basis index of `|b1 … bn⟩`.
pub fn basis_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | (b as usize & 1))
}

/// Computational basis column vector `|index⟩`.
pub fn basis_vector<T: Real>(index: usize, dim: usize) -> Vec<C<T>> {
    let mut v = vec![C::zero(); dim];
    v[index] = C::one();
    v
}

/// Coupled spin-½ system: chemical-shift offsets and scalar couplings, in Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem<T> {
    offsets: Vec<T>,
    couplings: Vec<Vec<T>>,
    labels: Vec<String>,
    reference_mhz: Option<T>,
}

impl<T: Real> SpinSystem<T> {
    /// Validates `2 ≤ n ≤ 10`, finite offsets, symmetric J with zero diagonal.
    pub fn new(offsets: Vec<T>, couplings: Vec<Vec<T>>, labels: Vec<String>) -> Result<Self> {
        let n = offsets.len();
        if !(2..=MAX_SPINS).contains(&n) {
            return Err(Error::domain(format!(
                "spin system needs 2..={MAX_SPINS} spins, got {n}"
            )));
        }
        if offsets.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("chemical-shift offsets must be finite"));
        }
        if couplings.len() != n || couplings.iter().any(|r| r.len() != n) {
            return Err(Error::domain(format!("J matrix must be {n}x{n}")));
        }
        for k in 0..n {
            if !couplings[k][k].is_zero() {
                return Err(Error::domain(format!("J[{0}][{0}] must be zero", k + 1)));
            }
            for l in 0..n {
                let (a, b) = (couplings[k][l], couplings[l][k]);
                if !a.is_finite() || a != b {
                    return Err(Error::domain(format!(
                        "J matrix must be finite and symmetric (J{}{} vs J{}{})",
                        k + 1,
                        l + 1,
                        l + 1,
                        k + 1
                    )));
                }
            }
        }
        if !labels.is_empty() && labels.len() != n {
            return Err(Error::domain(format!("expected {n} labels, got {}", labels.len())));
        }
        let labels = if labels.is_empty() {
            (1..=n).map(|k| format!("S{k}")).collect()
        } else {
            labels
        };
        Ok(SpinSystem {
            offsets,
            couplings,
            labels,
            reference_mhz: None,
        })
    }

    /// Convenience constructor from the upper-triangular couplings `(k, l, J)`, 1-based.
    pub fn from_pairs(offsets: Vec<T>, pairs: &[(usize, usize, T)]) -> Result<Self> {
        let n = offsets.len();
        let mut j = vec![vec![T::zero(); n]; n];
        for &(k, l, v) in pairs {
            check_spin(k, n)?;
            check_spin(l, n)?;
            if k == l {
                return Err(Error::domain("self-coupling is not allowed"));
            }
            j[k - 1][l - 1] = v;
            j[l - 1][k - 1] = v;
        }
        Self::new(offsets, j, Vec::new())
    }

    pub fn with_reference_mhz(mut self, mhz: T) -> Self {
        self.reference_mhz = Some(mhz);
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::domain("label count differs from spin count"));
        }
        self.labels = labels;
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.n()
    }

    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    /// ν_k in Hz (1-based).
    pub fn offset(&self, k: usize) -> T {
        self.offsets[k - 1]
    }

    /// J_kl in Hz (1-based, signed).
    pub fn coupling(&self, k: usize, l: usize) -> T {
        self.couplings[k - 1][l - 1]
    }

    pub fn couplings(&self) -> &[Vec<T>] {
        &self.couplings
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn reference_mhz(&self) -> Option<T> {
        self.reference_mhz
    }

    /// Same couplings, all offsets replaced.
    pub fn with_offsets(&self, offsets: Vec<T>) -> Result<Self> {
        let mut s = Self::new(offsets, self.couplings.clone(), self.labels.clone())?;
        s.reference_mhz = self.reference_mhz;
        Ok(s)
    }

    /// Σ_k I^k_z.
    pub fn total_iz(&self) -> Operator<T> {
        let n = self.n();
        let d: Vec<C<T>> = (0..self.dim())
            .map(|i| cr((1..=n).fold(T::zero(), |s, k| s + spin_m::<T>(i, k, n))))
            .collect();
        Operator::diagonal(&d)
    }

    /// Diagonal of the secular Hamiltonian `Σ (ν_k − carrier) I^k_z + Σ_{k<l} J_kl I^k_z I^l_z`, Hz.
    pub fn secular_energies(&self, carrier: T) -> Vec<T> {
        secular_energies(&self.offsets, &self.couplings, carrier)
    }

    /// Three-carbon example system (alanine-like). Offsets in Hz from a
    /// 125.76 MHz reference, couplings in Hz. Placeholder values: only J12
    /// and the two pulse carriers are anchored to published numbers.
    pub fn alanine_example() -> Self {
        let f = T::lit;
        SpinSystem::from_pairs(
            vec![f(2411.0), f(22180.25), f(6444.97)],
            &[(1, 2, f(-1.27)), (1, 3, f(35.98)), (2, 3, f(53.82))],
        )
        .and_then(|s| s.with_labels(vec!["C1".into(), "C2".into(), "C3".into()]))
        .expect("example parameters are valid")
        .with_reference_mhz(f(125.76))
    }

    /// Frequency of the spin-`k` line whose spectator spins are in the states
    /// encoded by basis index `index` (the bit of spin `k` itself is ignored):
    /// `ν_k + Σ_l J_kl m_l`.
    pub fn line_frequency(&self, k: usize, index: usize) -> T {
        let n = self.n();
        (1..=n).filter(|&l| l != k).fold(self.offset(k), |f, l| {
            f + self.coupling(k, l) * spin_m::<T>(index, l, n)
        })
    }
}

/// Secular energies for raw parameters; `offsets.len()` may be 1.
pub fn secular_energies<T: Real>(offsets: &[T], couplings: &[Vec<T>], carrier: T) -> Vec<T> {
    let n = offsets.len();
    (0..1usize << n)
        .map(|i| {
            let mut e = T::zero();
            for k in 1..=n {
                let mk: T = spin_m(i, k, n);
                e += (offsets[k - 1] - carrier) * mk;
                for l in (k + 1)..=n {
                    e += couplings[k - 1][l - 1] * mk * spin_m::<T>(i, l, n);
                }
            }
            e
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_z_single_spin() {
        let z = pauli::<f64>(Axis::Z, 1, 1).unwrap();
        assert_eq!(z, Operator::diagonal(&[cr(1.0), cr(-1.0)]));
    }

    #[test]
    fn pauli_x_flips_least_significant_spin() {
        let x = pauli::<f64>(Axis::X, 2, 2).unwrap();
        let out = x.apply(&basis_vector(0, 4)).unwrap();
        assert_eq!(out, basis_vector(1, 4));
    }

    #[test]
    fn pauli_y_on_middle_spin_matches_brute_force_kron() {
        let y = pauli::<f64>(Axis::Y, 2, 3).unwrap();
        // independent: explicit I ⊗ σy ⊗ I element formula
        for r in 0..8usize {
            for col in 0..8usize {
                let same_outer = (r & 0b101) == (col & 0b101);
                let (rb, cb) = ((r >> 1) & 1, (col >> 1) & 1);
                let expected = if !same_outer || rb == cb {
                    cr(0.0)
                } else if rb == 0 {
                    c(0.0, -1.0)
                } else {
                    c(0.0, 1.0)
                };
                assert_eq!(y[(r, col)], expected, "({r},{col})");
            }
        }
        // maps |000> to +i|010>
        assert_eq!(y[(2, 0)], c(0.0, 1.0));
    }

    #[test]
    fn angular_momentum_is_half_pauli() {
        let iz = angular_momentum::<f64>(Axis::Z, 1, 1).unwrap();
        assert_eq!(iz, Operator::diagonal(&[cr(0.5), cr(-0.5)]));
        let ix = angular_momentum::<f64>(Axis::X, 1, 1).unwrap();
        assert_eq!(ix.scale_real(2.0), pauli(Axis::X, 1, 1).unwrap());
        let iz2 = angular_momentum::<f64>(Axis::Z, 2, 3).unwrap();
        let tr = (&iz2 * &iz2).trace();
        assert!((tr - cr(2.0)).norm() < 1e-15);
    }

    #[test]
    fn trace_inner_examples() {
        let i8 = Operator::<f64>::identity(8);
        assert_eq!(trace_inner(&i8, &i8).unwrap(), cr(8.0));
        let x1 = pauli::<f64>(Axis::X, 1, 3).unwrap();
        let y1 = pauli::<f64>(Axis::Y, 1, 3).unwrap();
        assert_eq!(trace_inner(&x1, &y1).unwrap(), cr(0.0));
        let x2 = pauli::<f64>(Axis::X, 2, 3).unwrap();
        assert_eq!(trace_inner(&x2, &x2).unwrap(), cr(8.0));
        assert!(trace_inner(&x2, &Operator::identity(4)).is_err());
    }

    #[test]
    fn out_of_range_spin_is_domain_error() {
        assert!(matches!(pauli::<f64>(Axis::X, 0, 3), Err(Error::Domain(_))));
        assert!(matches!(pauli::<f64>(Axis::X, 4, 3), Err(Error::Domain(_))));
        assert!(pauli::<f64>(Axis::X, 1, 11).is_err());
    }

    #[test]
    fn basis_index_is_msb_first() {
        assert_eq!(basis_index(&[1, 0, 1]), 5);
        assert_eq!(spin_bit(5, 1, 3), 1);
        assert_eq!(spin_bit(5, 2, 3), 0);
        assert_eq!(spin_bit(5, 3, 3), 1);
    }

    #[test]
    fn spin_system_validation() {
        let ok = SpinSystem::<f64>::from_pairs(vec![0.0, 10.0, 20.0], &[(1, 2, -1.27)]).unwrap();
        assert_eq!(ok.coupling(2, 1), -1.27);
        assert!(SpinSystem::<f64>::new(vec![0.0], vec![vec![0.0]], vec![]).is_err());
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(SpinSystem::<f64>::new(vec![0.0, 1.0], asym, vec![]).is_err());
        let diag = vec![vec![1.0, 0.0], vec![0.0, 0.0]];
        assert!(SpinSystem::<f64>::new(vec![0.0, 1.0], diag, vec![]).is_err());
        let nan = SpinSystem::<f64>::new(vec![f64::NAN, 1.0], vec![vec![0.0; 2]; 2], vec![]);
        assert!(nan.is_err());
    }

    #[test]
    fn axis_parsing() {
        assert_eq!("y".parse::<Axis>().unwrap(), Axis::Y);
        assert!("xy".parse::<Axis>().is_err());
    }
}
