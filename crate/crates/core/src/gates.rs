//! Ideal gates: transition-pulse unitaries, textbook rotations and permutation
//! gates, and unitary equivalence checks.

use std::fmt;

use num_traits::{One, Zero};

use crate::eigen::expm_hermitian;
use crate::error::{Error, Result};
use crate::operator::Operator;
use crate::scalar::{c, cis, Real, C};
use crate::spin::{check_spin, pauli, projector, spin_bit, Axis};

/// Default tolerance for equivalence verdicts.
pub const EQUIVALENCE_TOL: f64 = 1e-10;

/// Rotation sense of a controlled transition π pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    /// `exp[+i(π/2)·σ_y^t·P]`
    Plus,
    /// `exp[−i(π/2)·σ_y^t·P]`
    Minus,
}

impl Sense {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Sense::Plus => T::one(),
            Sense::Minus => -T::one(),
        }
    }

    pub fn flipped(self) -> Sense {
        match self {
            Sense::Plus => Sense::Minus,
            Sense::Minus => Sense::Plus,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Plus => "+",
            Sense::Minus => "-",
        })
    }
}

/// Product of control projectors `Π |s_k⟩⟨s_k|`.
fn control_projector<T: Real>(controls: &[(usize, u8)], n: usize) -> Result<Operator<T>> {
    let mut p = Operator::identity(1 << n);
    for &(k, s) in controls {
        if s > 1 {
            return Err(Error::domain(format!("control state {s} is not 0 or 1")));
        }
        p = &p * &projector(k, s, n)?;
    }
    Ok(p)
}

fn check_distinct(spins: &[usize], n: usize) -> Result<()> {
    for (i, &k) in spins.iter().enumerate() {
        check_spin(k, n)?;
        if spins[..i].contains(&k) {
            return Err(Error::domain(format!("spin {k} is used twice")));
        }
    }
    Ok(())
}

/// Conditional rotation of `target` by `angle` about the transverse axis at
/// `phase` (radians from +x toward +y), active only when every control spin is
/// in its given state:
/// `exp[−i(θ/2)(cos φ σ_x + sin φ σ_y)^t · P_controls]`.
pub fn transition_rotation<T: Real>(
    controls: &[(usize, u8)],
    target: usize,
    angle: T,
    phase: T,
    n: usize,
) -> Result<Operator<T>> {
    let mut spins: Vec<usize> = controls.iter().map(|c| c.0).collect();
    spins.push(target);
    check_distinct(&spins, n)?;
    let axis = &pauli::<T>(Axis::X, target, n)?.scale_real(phase.cos())
        + &pauli::<T>(Axis::Y, target, n)?.scale_real(phase.sin());
    let gen = &axis * &control_projector(controls, n)?;
    expm_hermitian(&gen, -angle * T::half())
}

/// Controlled-NOT realized as a transition π pulse:
/// `exp[±i(π/2)·σ_y^target·P_control]`, i.e. `exp[±iπ·¼σ_y^t(1 − σ_z^c)]` when
/// conditioning on `|1⟩`.
pub fn transition_cnot<T: Real>(
    control: usize,
    target: usize,
    sense: Sense,
    control_state: u8,
    n: usize,
) -> Result<Operator<T>> {
    check_distinct(&[control, target], n)?;
    let gen = &pauli::<T>(Axis::Y, target, n)? * &control_projector(&[(control, control_state)], n)?;
    expm_hermitian(&gen, sense.sign::<T>() * T::FRAC_PI_2())
}

/// Toffoli realized as a transition π pulse conditioned on both controls in `|1⟩`:
/// `exp[−i(π/2)·σ_x^t·P_c1·P_c2]`.
pub fn transition_toffoli<T: Real>(controls: [usize; 2], target: usize, n: usize) -> Result<Operator<T>> {
    check_distinct(&[controls[0], controls[1], target], n)?;
    let gen = &pauli::<T>(Axis::X, target, n)?
        * &control_projector(&[(controls[0], 1), (controls[1], 1)], n)?;
    expm_hermitian(&gen, -T::FRAC_PI_2())
}

/// Spin 3 controls, spin 2 is flipped; three-spin system.
pub fn transition_cnot_32<T: Real>(sense: Sense) -> Operator<T> {
    transition_cnot(3, 2, sense, 1, 3).expect("fixed indices are valid")
}

/// Spins 1 and 2 control, spin 3 is flipped; `blockdiag(I₆, −iσ_x)`.
pub fn transition_toffoli_123<T: Real>() -> Operator<T> {
    transition_toffoli([1, 2], 3, 3).expect("fixed indices are valid")
}

/// The three-pulse controlled-swap, time-ordered: the `Sense::Minus` CNOT
/// pulse first, the Toffoli pulse, then the `Sense::Plus` CNOT pulse.
/// Equals `blockdiag(I₅, −iσ_x, 1)`.
pub fn fredkin_sequence<T: Real>() -> Operator<T> {
    let first = transition_cnot_32::<T>(Sense::Minus);
    let last = transition_cnot_32::<T>(Sense::Plus);
    &(&last * &transition_toffoli_123()) * &first
}

/// `U(−)·U_tof·U(+)`, the product with the `Sense::Plus` pulse applied first.
/// Equals `blockdiag(I₅, +iσ_x, 1)`: the conjugate phase on the swapped pair.
pub fn reversed_sense_product<T: Real>() -> Operator<T> {
    let first = transition_cnot_32::<T>(Sense::Plus);
    let last = transition_cnot_32::<T>(Sense::Minus);
    &(&last * &transition_toffoli_123()) * &first
}

/// `R^k_axis(θ) = exp[−i(θ/2)σ^k_axis]`.
pub fn rotation<T: Real>(spin: usize, axis: Axis, angle: T, n: usize) -> Result<Operator<T>> {
    let s = pauli::<T>(axis, spin, n)?;
    let half = angle * T::half();
    let id = Operator::identity(1 << n).scale_real(half.cos());
    Ok(&id + &s.scale(c(T::zero(), -half.sin())))
}

/// Permutation matrix sending `|i⟩ ↦ |map(i)⟩`.
fn permutation<T: Real>(n: usize, map: impl Fn(usize) -> usize) -> Operator<T> {
    let dim = 1 << n;
    let mut m = Operator::zeros(dim);
    for i in 0..dim {
        m[(map(i), i)] = C::one();
    }
    m
}

fn flip(i: usize, k: usize, n: usize) -> usize {
    i ^ (1 << (n - k))
}

pub fn cnot<T: Real>(control: usize, target: usize, n: usize) -> Result<Operator<T>> {
    check_distinct(&[control, target], n)?;
    Ok(permutation(n, |i| {
        if spin_bit(i, control, n) == 1 {
            flip(i, target, n)
        } else {
            i
        }
    }))
}

pub fn toffoli<T: Real>(controls: [usize; 2], target: usize, n: usize) -> Result<Operator<T>> {
    check_distinct(&[controls[0], controls[1], target], n)?;
    Ok(permutation(n, |i| {
        if spin_bit(i, controls[0], n) == 1 && spin_bit(i, controls[1], n) == 1 {
            flip(i, target, n)
        } else {
            i
        }
    }))
}

/// Controlled swap of `targets` when `control` is `|1⟩`.
pub fn fredkin<T: Real>(control: usize, targets: [usize; 2], n: usize) -> Result<Operator<T>> {
    check_distinct(&[control, targets[0], targets[1]], n)?;
    let [a, b] = targets;
    Ok(permutation(n, |i| {
        if spin_bit(i, control, n) == 1 && spin_bit(i, a, n) != spin_bit(i, b, n) {
            flip(flip(i, a, n), b, n)
        } else {
            i
        }
    }))
}

/// Two CNOTs (3→2) around a Toffoli (1,2→3).
pub fn fredkin_via_cnot_toffoli<T: Real>() -> Operator<T> {
    let cx = cnot::<T>(3, 2, 3).unwrap();
    let ccx = toffoli::<T>([1, 2], 3, 3).unwrap();
    &(&cx * &ccx) * &cx
}

/// Declarative gate description, resolved by [`ideal_gate`].
#[derive(Clone, Debug, PartialEq)]
pub enum GateSpec<T> {
    TransitionCnot {
        control: usize,
        target: usize,
        sense: Sense,
        control_state: u8,
    },
    TransitionToffoli {
        controls: [usize; 2],
        target: usize,
    },
    /// Angles in radians.
    TransitionRotation {
        controls: Vec<(usize, u8)>,
        target: usize,
        angle: T,
        phase: T,
    },
    Rotation {
        spin: usize,
        axis: Axis,
        angle: T,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Toffoli {
        controls: [usize; 2],
        target: usize,
    },
    Fredkin {
        control: usize,
        targets: [usize; 2],
    },
    Raw(Operator<T>),
}

impl<T: Real> GateSpec<T> {
    /// Target spin and control conditions, for transition-type gates.
    pub fn transition_geometry(&self) -> Option<(usize, Vec<(usize, u8)>)> {
        match self {
            GateSpec::TransitionCnot {
                control,
                target,
                control_state,
                ..
            } => Some((*target, vec![(*control, *control_state)])),
            GateSpec::TransitionToffoli { controls, target } => {
                Some((*target, vec![(controls[0], 1), (controls[1], 1)]))
            }
            GateSpec::TransitionRotation {
                controls, target, ..
            } => Some((*target, controls.clone())),
            _ => None,
        }
    }
}

impl<T: Real> fmt::Display for GateSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let deg = |r: T| r.to_degrees();
        match self {
            GateSpec::TransitionCnot {
                control,
                target,
                sense,
                control_state,
            } => {
                write!(f, "tcnot {control} {target} {sense}")?;
                if *control_state == 0 {
                    write!(f, " on0")?;
                }
                Ok(())
            }
            GateSpec::TransitionToffoli { controls, target } => {
                write!(f, "ttof {} {} {target}", controls[0], controls[1])
            }
            GateSpec::TransitionRotation {
                controls,
                target,
                angle,
                phase,
            } => {
                let cs: Vec<String> = controls.iter().map(|(k, s)| format!("{k}={s}")).collect();
                write!(
                    f,
                    "trot {} {target} {} {}",
                    if cs.is_empty() { "-".to_string() } else { cs.join(",") },
                    deg(*angle),
                    deg(*phase)
                )
            }
            GateSpec::Rotation { spin, axis, angle } => {
                write!(f, "rot {spin} {axis} {}", deg(*angle))
            }
            GateSpec::Cnot { control, target } => write!(f, "cnot {control} {target}"),
            GateSpec::Toffoli { controls, target } => {
                write!(f, "toffoli {} {} {target}", controls[0], controls[1])
            }
            GateSpec::Fredkin { control, targets } => {
                write!(f, "fredkin {control} {} {}", targets[0], targets[1])
            }
            GateSpec::Raw(m) => write!(f, "raw {}x{}", m.dim(), m.dim()),
        }
    }
}

/// Resolves a gate description to its unitary on `n` spins.
pub fn ideal_gate<T: Real>(spec: &GateSpec<T>, n: usize) -> Result<Operator<T>> {
    match spec {
        GateSpec::TransitionCnot {
            control,
            target,
            sense,
            control_state,
        } => transition_cnot(*control, *target, *sense, *control_state, n),
        GateSpec::TransitionToffoli { controls, target } => transition_toffoli(*controls, *target, n),
        GateSpec::TransitionRotation {
            controls,
            target,
            angle,
            phase,
        } => transition_rotation(controls, *target, *angle, *phase, n),
        GateSpec::Rotation { spin, axis, angle } => rotation(*spin, *axis, *angle, n),
        GateSpec::Cnot { control, target } => cnot(*control, *target, n),
        GateSpec::Toffoli { controls, target } => toffoli(*controls, *target, n),
        GateSpec::Fredkin { control, targets } => fredkin(*control, *targets, n),
        GateSpec::Raw(m) => {
            if m.dim() != 1 << n {
                return Err(Error::DimensionMismatch {
                    expected: 1 << n,
                    got: m.dim(),
                });
            }
            Ok(m.clone())
        }
    }
}

/// Per-basis-state phase of `v` relative to `u`: `v|j⟩ = phase · u|j⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseEntry<T> {
    pub state: usize,
    pub phase: C<T>,
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport<T> {
    pub exact: bool,
    pub global_phase: bool,
    pub monomial_phase: bool,
    /// `|Tr(u†v)| / dim`.
    pub fidelity: T,
    /// Filled when `monomial_phase` holds.
    pub phase_table: Option<Vec<PhaseEntry<T>>>,
}

impl<T: Real> EquivalenceReport<T> {
    /// Phase-table entries that differ from 1.
    pub fn nontrivial_phases(&self, tol: T) -> Vec<PhaseEntry<T>> {
        self.phase_table
            .iter()
            .flatten()
            .filter(|p| (p.phase - C::one()).norm() > tol)
            .cloned()
            .collect()
    }
}

/// Compares two unitaries at the default tolerance.
pub fn equivalence<T: Real>(u: &Operator<T>, v: &Operator<T>) -> Result<EquivalenceReport<T>> {
    equivalence_with_tol(u, v, T::lit(EQUIVALENCE_TOL))
}

/// Exact / global-phase / diagonal-phase equivalence of `u` and `v`.
///
/// The diagonal-phase mode holds when `u†v` is diagonal with unit-modulus
/// entries, i.e. `v = u·D`: the same basis-state map, each input carrying its
/// own phase.
pub fn equivalence_with_tol<T: Real>(
    u: &Operator<T>,
    v: &Operator<T>,
    tol: T,
) -> Result<EquivalenceReport<T>> {
    u.check_dim(v)?;
    if !u.is_unitary(tol) || !v.is_unitary(tol) {
        return Err(Error::domain("equivalence requires unitary operands"));
    }
    let dim = u.dim();
    let w = &u.adjoint() * v;
    let fidelity = w.trace().norm() / T::lit(dim as f64);

    let exact = u.max_abs_diff(v) <= tol;

    let monomial = (0..dim).all(|i| {
        (0..dim).all(|j| {
            let z = w[(i, j)];
            if i == j {
                (z.norm() - T::one()).abs() <= tol
            } else {
                z.norm() <= tol
            }
        })
    });
    let global = exact
        || (monomial && {
            let g = w[(0, 0)];
            (0..dim).all(|i| (w[(i, i)] - g).norm() <= tol)
        });
    let monomial = monomial || global;
    let phase_table = monomial.then(|| {
        (0..dim)
            .map(|j| PhaseEntry {
                state: j,
                phase: w[(j, j)],
            })
            .collect()
    });
    Ok(EquivalenceReport {
        exact,
        global_phase: global,
        monomial_phase: monomial,
        fidelity,
        phase_table,
    })
}

/// Fidelity maximized over diagonal phases: `max_D |Tr((v·D)†u)| / d = Σ_j |(v†u)_jj| / d`.
/// Equals 1 iff `u = v·D` for some diagonal unitary `D`.
pub fn phase_insensitive_fidelity<T: Real>(u: &Operator<T>, v: &Operator<T>) -> Result<T> {
    u.check_dim(v)?;
    let w = &v.adjoint() * u;
    let d = u.dim();
    Ok((0..d).fold(T::zero(), |s, j| s + w[(j, j)].norm()) / T::lit(d as f64))
}

/// `(e^{iφ})` helper for tests and callers building phase-shifted unitaries.
pub fn with_global_phase<T: Real>(u: &Operator<T>, phi: T) -> Operator<T> {
    u.scale(cis(phi))
}

/// `blockdiag(I₅, ±iσ_x, 1)`: the three-spin controlled swap with phase `±i`
/// on the swapped pair.
pub fn phased_fredkin_block<T: Real>(sign: T) -> Operator<T> {
    let mut m = Operator::identity(8);
    m[(5, 5)] = C::zero();
    m[(6, 6)] = C::zero();
    m[(5, 6)] = c(T::zero(), sign);
    m[(6, 5)] = c(T::zero(), sign);
    m
}

/// `blockdiag(I₆, −iσ_x)`.
pub fn toffoli_block<T: Real>() -> Operator<T> {
    let mut m = Operator::identity(8);
    m[(6, 6)] = C::zero();
    m[(7, 7)] = C::zero();
    m[(6, 7)] = c(T::zero(), -T::one());
    m[(7, 6)] = c(T::zero(), -T::one());
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;
    use crate::spin::basis_vector;

    fn eq2() -> Operator<f64> {
        Operator::from_real_rows(&[
            &[1., 0., 0., 0., 0., 0., 0., 0.],
            &[0., 0., 0., 1., 0., 0., 0., 0.],
            &[0., 0., 1., 0., 0., 0., 0., 0.],
            &[0., -1., 0., 0., 0., 0., 0., 0.],
            &[0., 0., 0., 0., 1., 0., 0., 0.],
            &[0., 0., 0., 0., 0., 0., 0., 1.],
            &[0., 0., 0., 0., 0., 0., 1., 0.],
            &[0., 0., 0., 0., 0., -1., 0., 0.],
        ])
        .unwrap()
    }

    #[test]
    fn transition_cnot_plus_matches_reference_entries() {
        let u = transition_cnot_32::<f64>(Sense::Plus);
        assert!(u.max_abs_diff(&eq2()) < 1e-12);
        // row 4, col 2 (1-indexed) is −1; row 2, col 4 is +1
        assert!((u[(3, 1)] - cr(-1.0)).norm() < 1e-12);
        assert!((u[(1, 3)] - cr(1.0)).norm() < 1e-12);
        let out = u.apply(&basis_vector(0, 8)).unwrap();
        assert!((out[0] - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn transition_cnot_senses_are_adjoint() {
        let p = transition_cnot_32::<f64>(Sense::Plus);
        let m = transition_cnot_32::<f64>(Sense::Minus);
        assert!((&p * &m).max_abs_diff(&Operator::identity(8)) < 1e-12);
        assert!(p.adjoint().max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn transition_cnot_acts_as_i_sigma_y_when_control_is_one() {
        let u = transition_cnot_32::<f64>(Sense::Plus);
        for b1 in 0..2usize {
            // spin-3 = 1: states |b1 0 1> and |b1 1 1>
            let (s0, s1) = (4 * b1 + 1, 4 * b1 + 3);
            // iσy = [[0, 1], [−1, 0]]
            assert!((u[(s0, s1)] - cr(1.0)).norm() < 1e-12);
            assert!((u[(s1, s0)] - cr(-1.0)).norm() < 1e-12);
            assert!(u[(s0, s0)].norm() < 1e-12);
            // spin-3 = 0: identity
            let (t0, t1) = (4 * b1, 4 * b1 + 2);
            assert!((u[(t0, t0)] - cr(1.0)).norm() < 1e-12);
            assert!((u[(t1, t1)] - cr(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn transition_toffoli_block_structure() {
        let u = transition_toffoli_123::<f64>();
        assert!(u.max_abs_diff(&toffoli_block()) < 1e-12);
        let out = u.apply(&basis_vector(6, 8)).unwrap();
        assert!((out[7] - c(0.0, -1.0)).norm() < 1e-12);
        assert!(u.powi(4).max_abs_diff(&Operator::identity(8)) < 1e-12);
    }

    #[test]
    fn fredkin_sequence_block_and_square() {
        let u = fredkin_sequence::<f64>();
        assert!(u.max_abs_diff(&phased_fredkin_block(-1.0)) < 1e-12);
        let mut sq = Operator::<f64>::identity(8);
        sq[(5, 5)] = cr(-1.0);
        sq[(6, 6)] = cr(-1.0);
        assert!((&u * &u).max_abs_diff(&sq) < 1e-12);
        assert!(reversed_sense_product::<f64>().max_abs_diff(&phased_fredkin_block(1.0)) < 1e-12);
    }

    #[test]
    fn transition_rotation_reproduces_named_pulses() {
        let pi = std::f64::consts::PI;
        let tc = transition_rotation::<f64>(&[(3, 1)], 2, pi, 1.5 * pi, 3).unwrap();
        assert!(tc.max_abs_diff(&transition_cnot_32(Sense::Plus)) < 1e-12);
        let tt = transition_rotation::<f64>(&[(1, 1), (2, 1)], 3, pi, 0.0, 3).unwrap();
        assert!(tt.max_abs_diff(&transition_toffoli_123()) < 1e-12);
    }

    #[test]
    fn control_on_zero_polarity() {
        let u = transition_cnot::<f64>(1, 2, Sense::Plus, 0, 2).unwrap();
        // control spin-1 in |0>: |00> → −|01>
        let out = u.apply(&basis_vector(0, 4)).unwrap();
        assert!((out[1] - cr(-1.0)).norm() < 1e-12);
        // control in |1>: untouched
        let out = u.apply(&basis_vector(2, 4)).unwrap();
        assert!((out[2] - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn textbook_gates() {
        let f = fredkin::<f64>(1, [2, 3], 3).unwrap();
        assert_eq!(f.apply(&basis_vector(5, 8)).unwrap(), basis_vector(6, 8));
        let cx = cnot::<f64>(3, 2, 3).unwrap();
        assert_eq!(cx.apply(&basis_vector(1, 8)).unwrap(), basis_vector(3, 8));
        assert!(cnot::<f64>(2, 2, 3).is_err());
        assert!(fredkin::<f64>(1, [2, 4], 3).is_err());
    }

    #[test]
    fn fig2b_construction_is_exactly_fredkin() {
        let built = fredkin_via_cnot_toffoli::<f64>();
        let f = fredkin::<f64>(1, [2, 3], 3).unwrap();
        assert_eq!(built, f);
        assert_eq!(built.apply(&basis_vector(6, 8)).unwrap(), basis_vector(5, 8));
    }

    #[test]
    fn rotation_convention_sends_iz_to_ix() {
        let r = rotation::<f64>(1, Axis::Y, std::f64::consts::FRAC_PI_2, 1).unwrap();
        let iz = crate::spin::angular_momentum::<f64>(Axis::Z, 1, 1).unwrap();
        let ix = crate::spin::angular_momentum::<f64>(Axis::X, 1, 1).unwrap();
        assert!(iz.conjugated_by(&r).unwrap().max_abs_diff(&ix) < 1e-15);
    }

    #[test]
    fn equivalence_modes() {
        let u = fredkin_sequence::<f64>();
        let same = equivalence(&u, &u).unwrap();
        assert!(same.exact && same.global_phase && same.monomial_phase);
        assert!((same.fidelity - 1.0).abs() < 1e-12);

        let shifted = with_global_phase(&u, std::f64::consts::PI / 7.0);
        let g = equivalence(&u, &shifted).unwrap();
        assert!(!g.exact && g.global_phase && g.monomial_phase);

        let f = fredkin::<f64>(1, [2, 3], 3).unwrap();
        let m = equivalence(&f, &u).unwrap();
        assert!(!m.exact && !m.global_phase && m.monomial_phase);
        // |Tr(F†U)| = |6 − 2i|
        assert!((m.fidelity - 10f64.sqrt() / 4.0).abs() < 1e-12);
        assert!((u.trace().norm() / 8.0 - 0.75).abs() < 1e-12);
        let odd = m.nontrivial_phases(1e-10);
        assert_eq!(odd.iter().map(|p| p.state).collect::<Vec<_>>(), vec![5, 6]);
        assert!(odd.iter().all(|p| (p.phase - c(0.0, -1.0)).norm() < 1e-12));

        let none = equivalence(&Operator::identity(8), &f).unwrap();
        assert!(!none.monomial_phase && none.phase_table.is_none());
    }

    #[test]
    fn equivalence_rejects_non_unitary() {
        let bad = Operator::<f64>::identity(8).scale_real(2.0);
        assert!(matches!(equivalence(&bad, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn phase_insensitive_fidelity_ignores_diagonal_phases() {
        let f = fredkin::<f64>(1, [2, 3], 3).unwrap();
        let u = fredkin_sequence::<f64>();
        assert!((phase_insensitive_fidelity(&u, &f).unwrap() - 1.0).abs() < 1e-12);
        let id = Operator::<f64>::identity(8);
        assert!((phase_insensitive_fidelity(&id, &f).unwrap() - 0.75).abs() < 1e-12);
    }
}
