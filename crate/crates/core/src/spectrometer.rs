//! Spectra: Hamiltonian, line templates, FID synthesis, DFT and peak picking.
//!
//! Detection uses `I^k_− = I^k_x − i·I^k_y`, so a coherence at frequency ν
//! (Hz, relative to the reference) appears as `A·e^{−i2πνt}` in the FID, with
//! `A = ρ_{↑↓}` for a line flipping spin k between `|0⟩` (↑) and `|1⟩` (↓).
//! [`spectrum`] uses the matching sign so the peak lands at `+ν` with phase
//! `arg A`: `X(f) = N^{−1/2} Σ_j s_j e^{+i2π(f − f_rx)t_j}` where `f_rx` is the
//! receiver offset. With the `N^{−1/2}` factor, `Σ|X|² = Σ|s|²`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_traits::Zero;
use rustfft::FftPlanner;

use crate::eigen::hermitian_eigen;
use crate::error::{Error, Result};
use crate::gates::rotation;
use crate::operator::Operator;
use crate::scalar::{c, cis, cr, Real, C};
use crate::spin::{angular_momentum, check_spin, spin_bit, Axis, SpinSystem};

/// Default number of FID points.
pub const DEFAULT_POINTS: usize = 8192;

/// Default exponential line broadening, Hz.
pub const DEFAULT_LINE_BROADENING: f64 = 0.2;

/// Smallest spectral width chosen by the window defaults, Hz.
pub const MIN_SPECTRAL_WIDTH: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CouplingMode {
    /// `Σ J_kl I^k_z I^l_z` only.
    #[default]
    Weak,
    /// Adds `J_kl (I^k_x I^l_x + I^k_y I^l_y)`.
    Full,
}

impl fmt::Display for CouplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingMode::Weak => "weak",
            CouplingMode::Full => "full",
        })
    }
}

impl FromStr for CouplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weak" => Ok(CouplingMode::Weak),
            "full" => Ok(CouplingMode::Full),
            _ => Err(Error::domain(format!("unknown coupling mode '{s}' (expected weak|full)"))),
        }
    }
}

/// H/h in Hz, in the reference frame.
#[derive(Clone, Debug)]
pub struct Hamiltonian<T> {
    pub operator: Operator<T>,
    pub mode: CouplingMode,
}

/// `Σ ν_k I^k_z + Σ_{k<l} J_kl I^k_z I^l_z` (weak), plus flip-flop terms (full).
pub fn hamiltonian<T: Real>(system: &SpinSystem<T>, mode: CouplingMode) -> Hamiltonian<T> {
    let n = system.n();
    let diag: Vec<C<T>> = system.secular_energies(T::zero()).into_iter().map(cr).collect();
    let mut h = Operator::diagonal(&diag);
    if mode == CouplingMode::Full {
        let i = |a, k| angular_momentum::<T>(a, k, n).expect("valid spin");
        for k in 1..=n {
            for l in (k + 1)..=n {
                let j = system.coupling(k, l);
                if j.is_zero() {
                    continue;
                }
                let ff = &(&i(Axis::X, k) * &i(Axis::X, l)) + &(&i(Axis::Y, k) * &i(Axis::Y, l));
                h += &ff.scale_real(j);
            }
        }
    }
    Hamiltonian { operator: h, mode }
}

/// A resolved or template NMR line.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumLine<T> {
    /// Hz from the reference.
    pub freq: T,
    pub amplitude: C<T>,
    /// In (−180, 180].
    pub phase_deg: T,
    /// Flipping spin (1-based); `None` when unassigned.
    pub spin: Option<usize>,
    /// States (0 = ↑, 1 = ↓) of the other spins, in spin order.
    pub spectators: Vec<u8>,
    /// Two template lines were equally close; no assignment was made.
    pub ambiguous: bool,
}

impl<T: Real> SpectrumLine<T> {
    /// Spectator pattern as a bit string, e.g. `"01"`.
    pub fn spectator_label(&self) -> String {
        self.spectators.iter().map(|b| char::from(b'0' + b)).collect()
    }
}

/// Phase in degrees folded into (−180, 180].
pub fn phase_degrees<T: Real>(z: C<T>) -> T {
    let d = z.arg().to_degrees();
    if d <= T::lit(-180.0) {
        d + T::lit(360.0)
    } else {
        d
    }
}

fn spectators_of(index: usize, k: usize, n: usize) -> Vec<u8> {
    (1..=n).filter(|&l| l != k).map(|l| spin_bit(index, l, n)).collect()
}

/// All `n·2^(n−1)` single-quantum lines with unit amplitude, ordered by
/// flipping spin and then spectator pattern.
pub fn transitions<T: Real>(system: &SpinSystem<T>) -> Vec<SpectrumLine<T>> {
    let n = system.n();
    (1..=n).flat_map(|k| spin_lines(system, k, |_| cr(T::one()))).collect()
}

fn spin_lines<T: Real>(
    system: &SpinSystem<T>,
    k: usize,
    amp: impl Fn((usize, usize)) -> C<T>,
) -> Vec<SpectrumLine<T>> {
    let n = system.n();
    (0..system.dim())
        .filter(|&i| spin_bit(i, k, n) == 0)
        .map(|up| {
            let down = up | (1 << (n - k));
            let a = amp((up, down));
            SpectrumLine {
                freq: system.line_frequency(k, up),
                amplitude: a,
                phase_deg: phase_degrees(a),
                spin: Some(k),
                spectators: spectators_of(up, k, n),
                ambiguous: false,
            }
        })
        .collect()
}

/// Weak-coupling line amplitudes `ρ_{↑↓}` of spin `k` for state `rho`.
pub fn line_amplitudes<T: Real>(
    system: &SpinSystem<T>,
    rho: &Operator<T>,
    k: usize,
) -> Result<Vec<SpectrumLine<T>>> {
    check_spin(k, system.n())?;
    rho.check_dim(&Operator::identity(system.dim()))?;
    Ok(spin_lines(system, k, |(up, down)| rho[(up, down)]))
}

/// Acquisition parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct FidParams<T> {
    /// Seconds.
    pub dwell: T,
    /// Power of two, at least 256.
    pub points: usize,
    /// Exponential apodization, Hz.
    pub line_broadening: T,
    /// Detected spins (1-based).
    pub observe: Vec<usize>,
    /// Receiver (demodulation) frequency, Hz from the reference.
    pub receiver_offset: T,
}

impl<T: Real> FidParams<T> {
    /// Window on spin `k`: only that spin is detected, the receiver sits at
    /// the centre of its multiplet, the spectral width covers the multiplet
    /// with 50% margin (at least [`MIN_SPECTRAL_WIDTH`]).
    pub fn for_spin(system: &SpinSystem<T>, k: usize) -> Result<Self> {
        check_spin(k, system.n())?;
        let lines: Vec<T> = spin_lines(system, k, |_| cr(T::one())).iter().map(|l| l.freq).collect();
        Ok(Self::covering(&lines, vec![k]))
    }

    /// All spins detected, spectral width covering every line.
    pub fn full_band(system: &SpinSystem<T>) -> Self {
        let lines: Vec<T> = transitions(system).iter().map(|l| l.freq).collect();
        Self::covering(&lines, (1..=system.n()).collect())
    }

    fn covering(lines: &[T], observe: Vec<usize>) -> Self {
        let lo = lines.iter().copied().fold(T::infinity(), T::min);
        let hi = lines.iter().copied().fold(T::neg_infinity(), T::max);
        let sw = ((hi - lo) * T::lit(1.5)).max(T::lit(MIN_SPECTRAL_WIDTH));
        FidParams {
            dwell: T::one() / sw,
            points: DEFAULT_POINTS,
            line_broadening: T::lit(DEFAULT_LINE_BROADENING),
            observe,
            receiver_offset: (lo + hi) * T::half(),
        }
    }

    pub fn spectral_width(&self) -> T {
        T::one() / self.dwell
    }

    /// Frequency spacing of the spectrum, Hz.
    pub fn bin_width(&self) -> T {
        T::one() / (self.dwell * T::lit(self.points as f64))
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.dwell > T::zero()) || !self.dwell.is_finite() {
            return Err(Error::domain("dwell must be positive"));
        }
        if self.points < 256 || !self.points.is_power_of_two() {
            return Err(Error::domain(format!(
                "points must be a power of two >= 256, got {}",
                self.points
            )));
        }
        if !(self.line_broadening >= T::zero()) || !self.line_broadening.is_finite() {
            return Err(Error::domain("line broadening must be non-negative"));
        }
        if !self.receiver_offset.is_finite() {
            return Err(Error::domain("receiver offset must be finite"));
        }
        if self.observe.is_empty() {
            return Err(Error::domain("at least one spin must be observed"));
        }
        for &k in &self.observe {
            check_spin(k, n)?;
        }
        Ok(())
    }
}

/// `s(t_j) = Tr[ρ(t_j) Σ_k I^k_−] · e^{i2π f_rx t_j} · e^{−π·LB·t_j}`, `t_j = j·dwell`.
pub fn fid<T: Real>(rho: &Operator<T>, h: &Hamiltonian<T>, params: &FidParams<T>) -> Result<Vec<C<T>>> {
    rho.check_dim(&h.operator)?;
    let n = rho
        .spin_count()
        .ok_or_else(|| Error::domain("density matrix dimension is not a power of two"))?;
    params.validate(n)?;

    let mut det = Operator::zeros(rho.dim());
    for &k in &params.observe {
        let ix = angular_momentum::<T>(Axis::X, k, n)?;
        let iy = angular_momentum::<T>(Axis::Y, k, n)?;
        det += &(&ix - &iy.scale(c(T::zero(), T::one())));
    }

    // Tr[ρ(t)O] = Σ_ab ρ'_ab O'_ba e^{−i2π(E_a − E_b)t} in the eigenbasis.
    let eig = hermitian_eigen(&h.operator)?;
    let v = &eig.vectors;
    let vh = v.adjoint();
    let rp = &(&vh * rho) * v;
    let op = &(&vh * &det) * v;
    let d = rho.dim();
    let floor = T::epsilon() * T::lit(1e-4);
    let mut coherences: Vec<(C<T>, T)> = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let w = rp[(a, b)] * op[(b, a)];
            if w.norm() > floor {
                coherences.push((w, eig.values[a] - eig.values[b] - params.receiver_offset));
            }
        }
    }

    let decay = T::lit(PI) * params.line_broadening;
    Ok((0..params.points)
        .map(|j| {
            let t = params.dwell * T::lit(j as f64);
            let s = coherences
                .iter()
                .fold(C::zero(), |acc, &(w, f)| acc + w * cis(-T::TAU() * f * t));
            s.scale((-decay * t).exp())
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumPoint<T> {
    /// Hz from the reference.
    pub freq: T,
    pub value: C<T>,
}

/// DFT of an FID. Bins run from `f_rx − SW/2` to `f_rx + SW/2 − SW/N`.
pub fn spectrum<T: Real>(fid: &[C<T>], params: &FidParams<T>) -> Result<Vec<SpectrumPoint<T>>> {
    let n = fid.len();
    if n != params.points {
        return Err(Error::DimensionMismatch {
            expected: params.points,
            got: n,
        });
    }
    if n < 256 || !n.is_power_of_two() {
        return Err(Error::domain("spectrum needs a power-of-two length >= 256"));
    }
    let mut buf = fid.to_vec();
    FftPlanner::<T>::new().plan_fft_inverse(n).process(&mut buf);
    let norm = T::one() / T::lit(n as f64).sqrt();
    let df = params.bin_width();
    let half = n / 2;
    Ok((0..n)
        .map(|i| {
            let src = (i + half) % n;
            let k = T::lit(i as f64) - T::lit(half as f64);
            SpectrumPoint {
                freq: params.receiver_offset + k * df,
                value: buf[src].scale(norm),
            }
        })
        .collect())
}

/// Local maxima of `|X|` above `fraction · max|X|`, phased by `correction_deg`
/// and assigned to the nearest `template` line closer than half the smallest
/// template gap. Equidistant candidates are flagged ambiguous.
pub fn peaks<T: Real>(
    spec: &[SpectrumPoint<T>],
    fraction: T,
    correction_deg: T,
    template: &[SpectrumLine<T>],
) -> Result<Vec<SpectrumLine<T>>> {
    if !(fraction > T::zero() && fraction < T::one()) {
        return Err(Error::domain("peak threshold fraction must be in (0, 1)"));
    }
    let mags: Vec<T> = spec.iter().map(|p| p.value.norm()).collect();
    let top = mags.iter().copied().fold(T::zero(), T::max);
    if top <= T::min_positive_value() {
        return Ok(Vec::new());
    }
    let limit = top * fraction;
    let rot = cis(correction_deg.to_radians());
    let window = half_min_gap(template);
    let tie = T::lit(1e-9);

    let mut out = Vec::new();
    for i in 0..spec.len() {
        let m = mags[i];
        let left = if i > 0 { mags[i - 1] } else { T::zero() };
        let right = mags.get(i + 1).copied().unwrap_or_else(T::zero);
        if m < limit || m <= left || m < right {
            continue;
        }
        let value = spec[i].value * rot;
        let mut line = SpectrumLine {
            freq: spec[i].freq,
            amplitude: value,
            phase_deg: phase_degrees(value),
            spin: None,
            spectators: Vec::new(),
            ambiguous: false,
        };
        let mut dist: Vec<(T, &SpectrumLine<T>)> = template
            .iter()
            .map(|t| ((t.freq - line.freq).abs(), t))
            .collect();
        dist.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite frequencies"));
        if let Some(&(d0, best)) = dist.first() {
            if d0 < window {
                if dist.len() > 1 && (dist[1].0 - d0).abs() <= tie {
                    line.ambiguous = true;
                } else {
                    line.spin = best.spin;
                    line.spectators = best.spectators.clone();
                }
            }
        }
        out.push(line);
    }
    Ok(out)
}

fn half_min_gap<T: Real>(template: &[SpectrumLine<T>]) -> T {
    let mut f: Vec<T> = template.iter().map(|l| l.freq).collect();
    f.sort_by(|a, b| a.partial_cmp(b).expect("finite frequencies"));
    let gap = f
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > T::lit(1e-9))
        .fold(T::infinity(), T::min);
    gap * T::half()
}

/// Conjugation of `rho` by simultaneous ideal rotations of `spins` about `axis`.
pub fn readout_pulse<T: Real>(rho: &Operator<T>, spins: &[usize], angle: T, axis: Axis) -> Result<Operator<T>> {
    let n = rho
        .spin_count()
        .ok_or_else(|| Error::domain("density matrix dimension is not a power of two"))?;
    let mut u = Operator::identity(rho.dim());
    for &k in spins {
        u = &rotation(k, axis, angle, n)? * &u;
    }
    rho.conjugated_by(&u)
}

/// Spectrum and peaks for one observation window.
#[derive(Clone, Debug)]
pub struct WindowResult<T> {
    pub params: FidParams<T>,
    pub spectrum: Vec<SpectrumPoint<T>>,
    pub peaks: Vec<SpectrumLine<T>>,
}

/// Default peak threshold relative to the tallest point.
pub const PEAK_FRACTION: f64 = 0.05;

/// Acquires spin `k` alone with [`FidParams::for_spin`] defaults.
pub fn observe_spin<T: Real>(
    system: &SpinSystem<T>,
    rho: &Operator<T>,
    k: usize,
    correction_deg: T,
    mode: CouplingMode,
) -> Result<WindowResult<T>> {
    let params = FidParams::for_spin(system, k)?;
    observe_with(system, rho, params, T::lit(PEAK_FRACTION), correction_deg, mode)
}

pub fn observe_with<T: Real>(
    system: &SpinSystem<T>,
    rho: &Operator<T>,
    params: FidParams<T>,
    fraction: T,
    correction_deg: T,
    mode: CouplingMode,
) -> Result<WindowResult<T>> {
    let h = hamiltonian(system, mode);
    let s = fid(rho, &h, &params)?;
    let spec = spectrum(&s, &params)?;
    let template: Vec<SpectrumLine<T>> = transitions(system)
        .into_iter()
        .filter(|l| l.spin.is_some_and(|k| params.observe.contains(&k)))
        .collect();
    let found = peaks(&spec, fraction, correction_deg, &template)?;
    Ok(WindowResult {
        params,
        spectrum: spec,
        peaks: found,
    })
}

/// `freq_hz,re,im,magnitude,phase_deg`, one row per bin.
pub fn write_spectrum_csv<T: Real>(mut w: impl Write, spec: &[SpectrumPoint<T>]) -> std::io::Result<()> {
    writeln!(w, "freq_hz,re,im,magnitude,phase_deg")?;
    for p in spec {
        writeln!(
            w,
            "{},{},{},{},{}",
            p.freq,
            p.value.re,
            p.value.im,
            p.value.norm(),
            phase_degrees(p.value)
        )?;
    }
    Ok(())
}

/// `spin,freq_hz,magnitude,phase_deg,spectators`. Unassigned peaks leave the
/// spin empty; ambiguous ones write `?` and `ambiguous`.
pub fn write_peaks_csv<T: Real>(mut w: impl Write, lines: &[SpectrumLine<T>]) -> std::io::Result<()> {
    writeln!(w, "spin,freq_hz,magnitude,phase_deg,spectators")?;
    for l in lines {
        let (spin, spect) = match (l.ambiguous, l.spin) {
            (true, _) => ("?".to_string(), "ambiguous".to_string()),
            (false, Some(k)) => (k.to_string(), l.spectator_label()),
            (false, None) => (String::new(), String::new()),
        };
        writeln!(
            w,
            "{spin},{},{},{},{spect}",
            l.freq,
            l.amplitude.norm(),
            l.phase_deg
        )?;
    }
    Ok(())
}
