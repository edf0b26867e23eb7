//! State preparation and pulse-sequence execution.
//!
//! All propagators returned here act in one common rotating frame at
//! `frame` Hz (relative to the spectrometer reference). A soft pulse is
//! computed in its own carrier frame, where the Hamiltonian is constant, and
//! converted with `Z(t₀+T) · U · Z(t₀)†`, `Z(t) = exp[−i2π(ν_c − ν_f)t ΣI_z]`.
//! Times are seconds, frequencies Hz, pulse phases degrees.

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;

use crate::eigen::expm_hermitian;
use crate::error::{Error, Result};
use crate::gates::{fredkin_sequence, ideal_gate, phase_insensitive_fidelity, rotation, GateSpec};
use crate::operator::Operator;
use crate::scalar::{cis, cr, Real, C};
use crate::spin::{angular_momentum, check_spin, pauli, secular_energies, spin_bit, spin_m, Axis, SpinSystem, MAX_SPINS};

/// Soft-pulse length used for the three transition pulses, seconds.
pub const PULSE_LENGTH: f64 = 0.06656;

/// Unitarity tolerance for propagators handed to [`apply_unitary`].
pub const UNITARY_TOL: f64 = 1e-10;

/// Soft-pulse phases (TP1, TP2, TP3) with TP1 and TP3 inverted.
pub const INVERTED_PHASES: [f64; 3] = [90.0, 0.0, 270.0];

/// Same as [`INVERTED_PHASES`] but TP3 repeats the TP1 phase.
pub const SAME_PHASES: [f64; 3] = [90.0, 0.0, 90.0];

/// Rectangular RF pulse.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftPulse<T> {
    /// Carrier offset from the reference, Hz.
    pub carrier: T,
    /// Nutation frequency ω₁/2π, Hz.
    pub amplitude: T,
    /// Degrees from +x toward +y in the carrier frame.
    pub phase_deg: T,
    /// Seconds.
    pub duration: T,
    /// Free-form annotations carried from the script (`key=value`).
    pub metadata: Vec<(String, String)>,
}

impl<T: Real> SoftPulse<T> {
    pub fn new(carrier: T, amplitude: T, phase_deg: T, duration: T) -> Result<Self> {
        let p = SoftPulse {
            carrier,
            amplitude,
            phase_deg,
            duration,
            metadata: Vec::new(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Nominal π pulse: amplitude `1/(2·duration)`.
    pub fn pi(carrier: T, phase_deg: T, duration: T) -> Result<Self> {
        if !(duration > T::zero()) {
            return Err(Error::domain("a calibrated π pulse needs a positive duration"));
        }
        Self::new(carrier, T::one() / (T::two() * duration), phase_deg, duration)
    }

    pub fn with_metadata(mut self, key: &str, value: &str) -> Self {
        self.metadata.push((key.to_string(), value.to_string()));
        self
    }

    /// On-resonance nutation angle 2π·ω₁/2π·T, radians.
    pub fn nominal_angle(&self) -> T {
        T::TAU() * self.amplitude * self.duration
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.carrier, self.amplitude, self.phase_deg, self.duration]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::domain("soft pulse parameters must be finite"));
        }
        if self.amplitude < T::zero() {
            return Err(Error::domain("soft pulse amplitude must be non-negative"));
        }
        if self.duration < T::zero() {
            return Err(Error::domain("soft pulse duration must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PulseEvent<T> {
    /// Instantaneous ideal unitary.
    Ideal(GateSpec<T>),
    Soft(SoftPulse<T>),
    /// Free evolution, seconds.
    Delay(T),
}

impl<T: Real> PulseEvent<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            PulseEvent::Ideal(_) => Ok(()),
            PulseEvent::Soft(p) => p.validate(),
            PulseEvent::Delay(t) => {
                if t.is_finite() && *t >= T::zero() {
                    Ok(())
                } else {
                    Err(Error::domain("delay must be finite and non-negative"))
                }
            }
        }
    }

    /// Wall-clock length under the soft model.
    pub fn duration(&self) -> T {
        match self {
            PulseEvent::Ideal(_) => T::zero(),
            PulseEvent::Soft(p) => p.duration,
            PulseEvent::Delay(t) => *t,
        }
    }
}

impl<T: Real> fmt::Display for PulseEvent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseEvent::Ideal(g) => write!(f, "ideal {g}"),
            PulseEvent::Soft(p) => {
                write!(
                    f,
                    "soft {} {} {} {}",
                    p.carrier, p.amplitude, p.phase_deg, p.duration
                )?;
                for (k, v) in &p.metadata {
                    write!(f, " {k}={v}")?;
                }
                Ok(())
            }
            PulseEvent::Delay(t) => write!(f, "delay {t}"),
        }
    }
}

/// Ordered list of events, applied first to last.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sequence<T> {
    events: Vec<PulseEvent<T>>,
}

impl<T: Real> Sequence<T> {
    pub fn new(events: Vec<PulseEvent<T>>) -> Result<Self> {
        for e in &events {
            e.validate()?;
        }
        Ok(Sequence { events })
    }

    pub fn push(&mut self, event: PulseEvent<T>) -> Result<()> {
        event.validate()?;
        self.events.push(event);
        Ok(())
    }

    pub fn events(&self) -> &[PulseEvent<T>] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn total_duration(&self) -> T {
        self.events.iter().fold(T::zero(), |s, e| s + e.duration())
    }
}

/// How soft pulses are propagated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Model {
    /// Soft pulses become instantaneous selective rotations of the lines
    /// within one nutation frequency of the carrier.
    Ideal,
    /// Full constant-Hamiltonian propagator over the pulse length.
    #[default]
    Soft,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Ideal => "ideal",
            Model::Soft => "soft",
        })
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(Model::Ideal),
            "soft" => Ok(Model::Soft),
            _ => Err(Error::domain(format!("unknown model '{s}' (expected ideal|soft)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions<T> {
    pub model: Model,
    /// Common frame, Hz from the reference.
    pub frame: T,
    /// Multiplies every soft-pulse amplitude (B₁ miscalibration).
    pub amplitude_scale: T,
}

impl<T: Real> Default for RunOptions<T> {
    fn default() -> Self {
        RunOptions {
            model: Model::Soft,
            frame: T::zero(),
            amplitude_scale: T::one(),
        }
    }
}

impl<T: Real> RunOptions<T> {
    pub fn with_model(model: Model) -> Self {
        RunOptions {
            model,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunResult<T> {
    pub rho: Operator<T>,
    pub unitary: Operator<T>,
    /// Accumulated sequence time, seconds.
    pub elapsed: T,
}

/// `(1/2^n)·I + ε·Σ_k I^k_z`.
pub fn equilibrium_state<T: Real>(n: usize, epsilon: T) -> Result<Operator<T>> {
    if n == 0 || n > MAX_SPINS {
        return Err(Error::domain(format!("spin count {n} outside 1..={MAX_SPINS}")));
    }
    let dim = 1usize << n;
    let base = T::one() / T::lit(dim as f64);
    let d: Vec<C<T>> = (0..dim)
        .map(|i| cr(base + epsilon * (1..=n).fold(T::zero(), |s, k| s + spin_m::<T>(i, k, n))))
        .collect();
    Ok(Operator::diagonal(&d))
}

/// Three-spin input state `(1/8)I + ε(I¹_x + I²_z + I³_x)`, prepared from
/// equilibrium by R¹_y(π/2) and R³_y(π/2).
pub fn prepare_input<T: Real>(epsilon: T) -> Operator<T> {
    let eq = equilibrium_state(3, epsilon).expect("n = 3 is valid");
    let r1 = rotation(1, Axis::Y, T::FRAC_PI_2(), 3).expect("valid spin");
    let r3 = rotation(3, Axis::Y, T::FRAC_PI_2(), 3).expect("valid spin");
    apply_unitary(&eq, &(&r3 * &r1)).expect("rotations are unitary")
}

/// `u · ρ · u†`.
pub fn apply_unitary<T: Real>(rho: &Operator<T>, u: &Operator<T>) -> Result<Operator<T>> {
    rho.check_dim(u)?;
    if !u.is_unitary(T::tol(UNITARY_TOL)) {
        return Err(Error::domain("propagator is not unitary"));
    }
    rho.conjugated_by(u)
}

/// `exp[−i2π·rate·t·Σ_k I^k_z]` on `n` spins.
pub fn frame_rotation<T: Real>(n: usize, rate: T, t: T) -> Operator<T> {
    let dim = 1usize << n;
    let d: Vec<C<T>> = (0..dim)
        .map(|i| {
            let m = (1..=n).fold(T::zero(), |s, k| s + spin_m::<T>(i, k, n));
            cis(-T::TAU() * rate * t * m)
        })
        .collect();
    Operator::diagonal(&d)
}

/// Free evolution for `t` seconds under the secular Hamiltonian in the frame
/// at `frame` Hz. Accepts a single spin (`offsets.len() == 1`).
pub fn free_evolution<T: Real>(offsets: &[T], couplings: &[Vec<T>], frame: T, t: T) -> Operator<T> {
    let d: Vec<C<T>> = secular_energies(offsets, couplings, frame)
        .into_iter()
        .map(|e| cis(-T::TAU() * e * t))
        .collect();
    Operator::diagonal(&d)
}

/// Square-pulse propagator for raw spin parameters, in the common frame.
/// `start` is the sequence time at which the pulse begins.
pub fn square_pulse<T: Real>(
    offsets: &[T],
    couplings: &[Vec<T>],
    pulse: &SoftPulse<T>,
    frame: T,
    start: T,
    amplitude_scale: T,
) -> Result<Operator<T>> {
    pulse.validate()?;
    let n = offsets.len();
    check_spin(1, n)?;
    let dim = 1usize << n;
    let phi = pulse.phase_deg.to_radians();
    let nu1 = pulse.amplitude * amplitude_scale;

    let diag: Vec<C<T>> = secular_energies(offsets, couplings, pulse.carrier)
        .into_iter()
        .map(cr)
        .collect();
    let mut h = Operator::diagonal(&diag);
    if !nu1.is_zero() {
        for k in 1..=n {
            let ix = angular_momentum::<T>(Axis::X, k, n)?;
            let iy = angular_momentum::<T>(Axis::Y, k, n)?;
            h += &(&ix.scale_real(nu1 * phi.cos()) + &iy.scale_real(nu1 * phi.sin()));
        }
    }
    debug_assert_eq!(h.dim(), dim);
    let u = expm_hermitian(&h, -T::TAU() * pulse.duration)?;
    let rate = pulse.carrier - frame;
    let before = frame_rotation(n, rate, start).adjoint();
    let after = frame_rotation(n, rate, start + pulse.duration);
    Ok(&(&after * &u) * &before)
}

/// Soft-pulse propagator on `system` in the common frame.
pub fn soft_pulse_unitary<T: Real>(
    system: &SpinSystem<T>,
    pulse: &SoftPulse<T>,
    frame: T,
    start: T,
    amplitude_scale: T,
) -> Result<Operator<T>> {
    square_pulse(
        system.offsets(),
        system.couplings(),
        pulse,
        frame,
        start,
        amplitude_scale,
    )
}

/// Instantaneous idealization of a soft pulse: every line within one nutation
/// frequency of the carrier is rotated by the nominal angle about the pulse
/// axis; all other lines are untouched. Expressed in the common frame at
/// sequence time `start`.
pub fn selective_rotation<T: Real>(
    system: &SpinSystem<T>,
    pulse: &SoftPulse<T>,
    frame: T,
    start: T,
    amplitude_scale: T,
) -> Result<Operator<T>> {
    pulse.validate()?;
    let n = system.n();
    let dim = system.dim();
    let phi = pulse.phase_deg.to_radians();
    let mut gen = Operator::zeros(dim);
    for k in 1..=n {
        let sel: Vec<C<T>> = (0..dim)
            .map(|i| {
                let hit = (system.line_frequency(k, i) - pulse.carrier).abs() <= pulse.amplitude;
                if hit {
                    cr(T::one())
                } else {
                    C::zero()
                }
            })
            .collect();
        if sel.iter().all(|v| v.is_zero()) {
            continue;
        }
        let axis = &pauli::<T>(Axis::X, k, n)?.scale_real(phi.cos())
            + &pauli::<T>(Axis::Y, k, n)?.scale_real(phi.sin());
        gen += &(&axis * &Operator::diagonal(&sel));
    }
    let angle = pulse.nominal_angle() * amplitude_scale;
    let u = expm_hermitian(&gen, -angle * T::half())?;
    let z = frame_rotation(n, pulse.carrier - frame, start);
    Ok(&(&z * &u) * &z.adjoint())
}

/// Propagator of one event and the time it consumes.
pub fn event_unitary<T: Real>(
    system: &SpinSystem<T>,
    event: &PulseEvent<T>,
    opts: &RunOptions<T>,
    start: T,
) -> Result<(Operator<T>, T)> {
    match event {
        PulseEvent::Ideal(g) => Ok((ideal_gate(g, system.n())?, T::zero())),
        PulseEvent::Delay(t) => {
            event.validate()?;
            Ok((
                free_evolution(system.offsets(), system.couplings(), opts.frame, *t),
                *t,
            ))
        }
        PulseEvent::Soft(p) => match opts.model {
            Model::Soft => Ok((
                soft_pulse_unitary(system, p, opts.frame, start, opts.amplitude_scale)?,
                p.duration,
            )),
            Model::Ideal => Ok((
                selective_rotation(system, p, opts.frame, start, opts.amplitude_scale)?,
                T::zero(),
            )),
        },
    }
}

/// Total propagator of `seq` (first event rightmost).
pub fn sequence_unitary<T: Real>(
    system: &SpinSystem<T>,
    seq: &Sequence<T>,
    opts: &RunOptions<T>,
) -> Result<(Operator<T>, T)> {
    let mut u = Operator::identity(system.dim());
    let mut t = T::zero();
    for e in seq.events() {
        let (step, dt) = event_unitary(system, e, opts, t)?;
        u = &step * &u;
        t += dt;
    }
    Ok((u, t))
}

/// Runs `seq` on `rho0`; returns the final state and the total propagator.
pub fn run_sequence<T: Real>(
    system: &SpinSystem<T>,
    seq: &Sequence<T>,
    rho0: &Operator<T>,
    opts: &RunOptions<T>,
) -> Result<RunResult<T>> {
    rho0.check_dim(&Operator::identity(system.dim()))?;
    let (unitary, elapsed) = sequence_unitary(system, seq, opts)?;
    let rho = apply_unitary(rho0, &unitary)?;
    Ok(RunResult {
        rho,
        unitary,
        elapsed,
    })
}

/// Mean frequency of the `target` lines whose control spins are in the given
/// states; free spectators are averaged over.
pub fn transition_line_center<T: Real>(
    system: &SpinSystem<T>,
    target: usize,
    controls: &[(usize, u8)],
) -> Result<T> {
    let n = system.n();
    check_spin(target, n)?;
    for &(k, _) in controls {
        check_spin(k, n)?;
    }
    let lines: Vec<T> = (0..system.dim())
        .filter(|&i| spin_bit(i, target, n) == 0)
        .filter(|&i| controls.iter().all(|&(k, s)| spin_bit(i, k, n) == s))
        .map(|i| system.line_frequency(target, i))
        .collect();
    if lines.is_empty() {
        return Err(Error::domain("no line matches the control conditions"));
    }
    let sum = lines.iter().fold(T::zero(), |s, &v| s + v);
    Ok(sum / T::lit(lines.len() as f64))
}

/// The three-pulse soft controlled-swap on a three-spin system: spin-2 lines
/// with spin 3 in `|1⟩`, then the spin-3 line with spins 1, 2 in `|1⟩`, then
/// the spin-2 lines again. `interval` is the carrier-switch delay inserted
/// before the second and third pulses. Phases in degrees.
pub fn fredkin_soft_sequence<T: Real>(
    system: &SpinSystem<T>,
    phases: [T; 3],
    interval: T,
) -> Result<Sequence<T>> {
    if system.n() != 3 {
        return Err(Error::domain("the three-pulse sequence needs a three-spin system"));
    }
    let length = T::lit(PULSE_LENGTH);
    let cnot_carrier = transition_line_center(system, 2, &[(3, 1)])?;
    let tof_carrier = transition_line_center(system, 3, &[(1, 1), (2, 1)])?;
    let pulse = |carrier: T, target: usize, phase: T, name: &str| -> Result<PulseEvent<T>> {
        let shift = carrier - system.offset(target);
        Ok(PulseEvent::Soft(
            SoftPulse::pi(carrier, phase, length)?
                .with_metadata("name", name)
                .with_metadata("shift", &format!("{shift:.2}")),
        ))
    };
    let mut events = vec![pulse(cnot_carrier, 2, phases[0], "TP1")?];
    if interval > T::zero() {
        events.push(PulseEvent::Delay(interval));
    }
    events.push(pulse(tof_carrier, 3, phases[1], "TP2")?);
    if interval > T::zero() {
        events.push(PulseEvent::Delay(interval));
    }
    events.push(pulse(cnot_carrier, 2, phases[2], "TP3")?);
    Sequence::new(events)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCancellation<T> {
    pub fid_inverted: T,
    pub fid_same: T,
}

/// Compares TP1/TP3 phase inversion against equal phases, with carrier-switch
/// delays of `interval` seconds. Fidelities are phase-insensitive, against the
/// ideal three-pulse product.
pub fn phase_cancellation_experiment<T: Real>(
    system: &SpinSystem<T>,
    interval: T,
    model: Model,
) -> Result<PhaseCancellation<T>> {
    if !(interval >= T::zero()) {
        return Err(Error::domain("switch interval must be non-negative"));
    }
    let target = fredkin_sequence::<T>();
    let opts = RunOptions::with_model(model);
    let run = |phases: [f64; 3]| -> Result<T> {
        let ph = phases.map(T::lit);
        let seq = fredkin_soft_sequence(system, ph, interval)?;
        let (u, _) = sequence_unitary(system, &seq, &opts)?;
        phase_insensitive_fidelity(&target, &u)
    };
    Ok(PhaseCancellation {
        fid_inverted: run(INVERTED_PHASES)?,
        fid_same: run(SAME_PHASES)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{equivalence, transition_cnot_32, Sense};
    use crate::product::decompose;

    fn single(offset: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
        (vec![offset], vec![vec![0.0]])
    }

    #[test]
    fn equilibrium_and_input_states() {
        let eq = equilibrium_state(3, 1.0f64).unwrap();
        let d = decompose(&eq).unwrap();
        assert_eq!(d.labels(), ["I1z", "I2z", "I3z"]);
        assert!((d.identity_part - 1.0).abs() < 1e-12);

        let rin = prepare_input(1.0f64);
        let d = decompose(&rin).unwrap();
        assert_eq!(d.labels(), ["I1x", "I2z", "I3x"]);
        for l in d.labels() {
            assert!((d.coefficient(&l).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(prepare_input(0.0), Operator::identity(8).scale_real(0.125));

        let one = equilibrium_state(1, 0.4f64).unwrap();
        assert!((one[(0, 0)].re - 0.7).abs() < 1e-15);
        assert!((one[(1, 1)].re - 0.3).abs() < 1e-15);
    }

    #[test]
    fn apply_unitary_rejects_bad_input() {
        let rho = equilibrium_state(2, 1.0).unwrap();
        let not_u = Operator::identity(4).scale_real(2.0);
        assert!(apply_unitary(&rho, &not_u).is_err());
        assert!(apply_unitary(&rho, &Operator::identity(8)).is_err());
        assert_eq!(apply_unitary(&rho, &Operator::identity(4)).unwrap(), rho);
    }

    #[test]
    fn rabi_pi_pulse_on_resonance() {
        let (nu, j) = single(0.0);
        let t = PULSE_LENGTH;
        let p = SoftPulse::pi(0.0, 0.0, t).unwrap();
        let u = square_pulse(&nu, &j, &p, 0.0, 0.0, 1.0).unwrap();
        let ideal = rotation(1, Axis::X, std::f64::consts::PI, 1).unwrap();
        let rep = equivalence(&ideal, &u).unwrap();
        assert!(rep.fidelity >= 1.0 - 1e-9, "{}", rep.fidelity);
    }

    #[test]
    fn far_off_resonance_is_suppressed() {
        let t = 0.01;
        let nu1 = 1.0 / (2.0 * t);
        let (nu, j) = single(100.0 * nu1);
        let p = SoftPulse::pi(0.0, 0.0, t).unwrap();
        let u = square_pulse(&nu, &j, &p, 0.0, 0.0, 1.0).unwrap();
        // brute-force 2×2: |⟨1|U|0⟩|² = (ν₁/Ω)² sin²(πΩT)
        let omega = (nu1 * nu1 + (100.0 * nu1).powi(2)).sqrt();
        let flip = (nu1 / omega).powi(2) * (std::f64::consts::PI * omega * t).sin().powi(2);
        assert!((u[(1, 0)].norm_sqr() - flip).abs() < 1e-12);
        let f = phase_insensitive_fidelity(&Operator::identity(2), &u).unwrap();
        assert!(f >= 0.999, "{f}");
    }

    #[test]
    fn zero_length_pulse_is_frame_conversion_only() {
        let sys = SpinSystem::<f64>::alanine_example();
        let p = SoftPulse::new(100.0, 5.0, 30.0, 0.0).unwrap();
        let u = soft_pulse_unitary(&sys, &p, 0.0, 0.0123, 1.0).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(8)) < 1e-12);
    }

    #[test]
    fn splitting_a_pulse_preserves_the_propagator() {
        let sys = SpinSystem::<f64>::alanine_example();
        let whole = SoftPulse::new(6400.07, 7.5, 37.0, 0.02).unwrap();
        let half = SoftPulse::new(6400.07, 7.5, 37.0, 0.01).unwrap();
        let t0 = 0.0031;
        let u = soft_pulse_unitary(&sys, &whole, 0.0, t0, 1.0).unwrap();
        let a = soft_pulse_unitary(&sys, &half, 0.0, t0, 1.0).unwrap();
        let b = soft_pulse_unitary(&sys, &half, 0.0, t0 + 0.01, 1.0).unwrap();
        assert!((&b * &a).max_abs_diff(&u) < 1e-9);
    }

    /// Independent oracle: integrate the drive in the common frame, where it
    /// rotates at (carrier − frame), by exponential-midpoint time slicing.
    #[test]
    fn frame_conversion_agrees_with_time_slicing() {
        let nu = vec![40.0, -25.0];
        let j = vec![vec![0.0, 6.0], vec![6.0, 0.0]];
        let p = SoftPulse::new(30.0, 20.0, 45.0, 0.01).unwrap();
        let (frame, t0) = (5.0, 0.002);
        let u = square_pulse(&nu, &j, &p, frame, t0, 1.0).unwrap();

        let steps = 4000;
        let dt = p.duration / steps as f64;
        let diag: Vec<C<f64>> = secular_energies(&nu, &j, frame).into_iter().map(cr).collect();
        let h0 = Operator::diagonal(&diag);
        let mut sliced = Operator::identity(4);
        for s in 0..steps {
            let t = t0 + (s as f64 + 0.5) * dt;
            let ph = p.phase_deg.to_radians() + std::f64::consts::TAU * (p.carrier - frame) * t;
            let mut h = h0.clone();
            for k in 1..=2 {
                h += &angular_momentum(Axis::X, k, 2).unwrap().scale_real(p.amplitude * ph.cos());
                h += &angular_momentum(Axis::Y, k, 2).unwrap().scale_real(p.amplitude * ph.sin());
            }
            let step = expm_hermitian(&h, -std::f64::consts::TAU * dt).unwrap();
            sliced = &step * &sliced;
        }
        assert!(sliced.max_abs_diff(&u) < 1e-6, "{}", sliced.max_abs_diff(&u));
    }

    #[test]
    fn free_precession_of_ix() {
        let (nu, j) = single(10.0);
        let t = 0.013;
        let u = free_evolution(&nu, &j, 0.0, t);
        let ix = angular_momentum::<f64>(Axis::X, 1, 1).unwrap();
        let iy = angular_momentum::<f64>(Axis::Y, 1, 1).unwrap();
        let a = std::f64::consts::TAU * 10.0 * t;
        let want = &ix.scale_real(a.cos()) + &iy.scale_real(a.sin());
        assert!(ix.conjugated_by(&u).unwrap().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn ideal_three_pulse_sequence_is_the_fredkin_product() {
        let sys = SpinSystem::<f64>::alanine_example();
        let events = vec![
            PulseEvent::Ideal(GateSpec::TransitionCnot {
                control: 3,
                target: 2,
                sense: Sense::Minus,
                control_state: 1,
            }),
            PulseEvent::Ideal(GateSpec::TransitionToffoli {
                controls: [1, 2],
                target: 3,
            }),
            PulseEvent::Ideal(GateSpec::TransitionCnot {
                control: 3,
                target: 2,
                sense: Sense::Plus,
                control_state: 1,
            }),
        ];
        let seq = Sequence::new(events).unwrap();
        let run = run_sequence(&sys, &seq, &prepare_input(1.0), &RunOptions::default()).unwrap();
        assert!(run.unitary.max_abs_diff(&fredkin_sequence()) < 1e-12);
        assert_eq!(run.elapsed, 0.0);

        let empty = Sequence::new(vec![]).unwrap();
        let (u, _) = sequence_unitary(&sys, &empty, &RunOptions::default()).unwrap();
        assert_eq!(u, Operator::identity(8));
    }

    #[test]
    fn soft_sequence_in_ideal_model_reproduces_the_product() {
        let sys = SpinSystem::<f64>::alanine_example();
        let seq = fredkin_soft_sequence(&sys, INVERTED_PHASES, 0.0).unwrap();
        let (u, _) = sequence_unitary(&sys, &seq, &RunOptions::with_model(Model::Ideal)).unwrap();
        assert!(u.max_abs_diff(&fredkin_sequence()) < 1e-12);
        match &seq.events()[0] {
            PulseEvent::Soft(p) => {
                assert!((p.carrier - 22153.34).abs() < 1e-9);
                assert!(p.metadata.contains(&("shift".into(), "-26.91".into())));
            }
            e => panic!("unexpected {e}"),
        }
        match &seq.events()[1] {
            PulseEvent::Soft(p) => assert!((p.carrier - 6400.07).abs() < 1e-9),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn cnot_pulse_projected_on_target_lines() {
        let sys = SpinSystem::<f64>::alanine_example();
        let carrier = transition_line_center(&sys, 2, &[(3, 1)]).unwrap();
        let p = SoftPulse::pi(carrier, 90.0, PULSE_LENGTH).unwrap();
        let u = soft_pulse_unitary(&sys, &p, 0.0, 0.0, 1.0).unwrap();
        let ideal = transition_cnot_32::<f64>(Sense::Minus);
        // states with spin 3 in |1⟩
        let sub = [1usize, 3, 5, 7];
        let m = ideal.adjoint().matmul(&u).unwrap();
        let f = sub.iter().map(|&i| m[(i, i)].norm()).sum::<f64>() / sub.len() as f64;
        assert!(f >= 0.99, "{f}");
    }

    #[test]
    fn phase_experiment_trivial_limits() {
        let flat = SpinSystem::<f64>::alanine_example().with_offsets(vec![0.0; 3]).unwrap();
        let r = phase_cancellation_experiment(&flat, 0.0, Model::Ideal).unwrap();
        assert!((r.fid_inverted - 1.0).abs() < 1e-12);
        assert!((r.fid_same - 1.0).abs() < 1e-12);
        let sys = SpinSystem::<f64>::alanine_example();
        let r = phase_cancellation_experiment(&sys, 1e-3, Model::Ideal).unwrap();
        assert!((r.fid_inverted - 1.0).abs() < 1e-12);
        assert!((r.fid_same - 1.0).abs() < 1e-12);
    }

    #[test]
    fn model_round_trip() {
        for m in [Model::Ideal, Model::Soft] {
            assert_eq!(m.to_string().parse::<Model>().unwrap(), m);
        }
        assert!("hard".parse::<Model>().is_err());
    }
}
