//! Can one selective pulse cover a transition gate's lines?

use std::fmt;

use crate::error::{Error, Result};
use crate::gates::GateSpec;
use crate::scalar::Real;
use crate::spin::{check_spin, spin_bit, SpinSystem};

#[derive(Clone, Debug, PartialEq)]
pub struct PulsePlan<T> {
    pub target_spin: usize,
    /// Frequencies (Hz) of the lines the gate must rotate, ascending.
    pub target_lines: Vec<T>,
    /// `max − min` of the target lines.
    pub spread: T,
    /// Distance from the closest non-target line to the nearest target line.
    pub required_selectivity: T,
    pub resolution: T,
    pub single_pulse_feasible: bool,
    /// 1 when feasible, otherwise the number of line groups more than one
    /// resolution apart.
    pub pulses_required: usize,
}

impl<T: Real> fmt::Display for PulsePlan<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.target_lines.iter().map(|v| v.to_string()).collect();
        writeln!(f, "target_spin: {}", self.target_spin)?;
        writeln!(f, "target_lines: {}", lines.join(" "))?;
        writeln!(f, "spread_hz: {}", self.spread)?;
        writeln!(f, "required_selectivity_hz: {}", self.required_selectivity)?;
        writeln!(f, "resolution_hz: {}", self.resolution)?;
        writeln!(f, "single_pulse_feasible: {}", self.single_pulse_feasible)?;
        write!(f, "pulses_required: {}", self.pulses_required)
    }
}

/// Lists the single-quantum lines a transition gate acts on and decides
/// whether a single pulse can cover them: the target lines must lie within
/// `resolution` of each other and every other line must be farther than
/// `spread + resolution` from them.
pub fn plan_transition_pulse<T: Real>(
    system: &SpinSystem<T>,
    gate: &GateSpec<T>,
    resolution: T,
) -> Result<PulsePlan<T>> {
    if !(resolution > T::zero()) || !resolution.is_finite() {
        return Err(Error::domain("resolution must be positive"));
    }
    let (target, controls) = gate
        .transition_geometry()
        .ok_or_else(|| Error::domain(format!("'{gate}' is not a transition gate")))?;
    let n = system.n();
    check_spin(target, n)?;
    for &(k, _) in &controls {
        check_spin(k, n)?;
        if k == target {
            return Err(Error::domain("control and target spins coincide"));
        }
    }

    let mut targets = Vec::new();
    let mut others = Vec::new();
    for k in 1..=n {
        for i in (0..system.dim()).filter(|&i| spin_bit(i, k, n) == 0) {
            let f = system.line_frequency(k, i);
            let hit = k == target && controls.iter().all(|&(c, s)| spin_bit(i, c, n) == s);
            if hit {
                targets.push(f);
            } else {
                others.push(f);
            }
        }
    }
    targets.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let spread = targets[targets.len() - 1] - targets[0];
    let required_selectivity = others
        .iter()
        .map(|&o| targets.iter().map(|&t| (o - t).abs()).fold(T::infinity(), T::min))
        .fold(T::infinity(), T::min);
    let single_pulse_feasible = spread <= resolution && required_selectivity > spread + resolution;
    let pulses_required = if single_pulse_feasible {
        1
    } else {
        1 + targets.windows(2).filter(|w| w[1] - w[0] > resolution).count()
    };
    Ok(PulsePlan {
        target_spin: target,
        target_lines: targets,
        spread,
        required_selectivity,
        resolution,
        single_pulse_feasible,
        pulses_required,
    })
}
