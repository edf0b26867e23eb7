use proptest::prelude::*;

use transpulse::config::Config;
use transpulse::eigen::{expm_hermitian, hermitian_eigen};
use transpulse::gates::{equivalence, ideal_gate, GateSpec, Sense};
use transpulse::product::{compose, decompose, ProductTerm};
use transpulse::scalar::{c, C};
use transpulse::script::parse_gate;
use transpulse::sequence::{apply_unitary, soft_pulse_unitary, SoftPulse};
use transpulse::spectrometer::{spectrum, FidParams};
use transpulse::spin::{angular_momentum, Axis};
use transpulse::{Operator64 as Op, SpinSystem64};

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(200)
}

fn hermitian(d: usize) -> impl Strategy<Value = Op> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
        let m = Op::from_fn(d, |r, k| c(v[r * d + k].0, v[r * d + k].1));
        (&m + &m.adjoint()).scale_real(0.5)
    })
}

fn system(n: usize) -> impl Strategy<Value = SpinSystem64> {
    (
        prop::collection::vec(-800.0f64..800.0, n),
        prop::collection::vec(-60.0f64..60.0, n * (n - 1) / 2),
    )
        .prop_map(move |(offsets, js)| {
            let mut pairs = Vec::new();
            let mut it = js.into_iter();
            for k in 1..=n {
                for l in (k + 1)..=n {
                    pairs.push((k, l, it.next().unwrap()));
                }
            }
            SpinSystem64::from_pairs(offsets, &pairs).unwrap()
        })
}

fn gate() -> impl Strategy<Value = GateSpec<f64>> {
    let perm = Just(vec![1usize, 2, 3]).prop_shuffle();
    (perm, 0..7usize, any::<bool>(), 0..2u8, -360i32..360).prop_map(|(p, kind, plus, s, deg)| {
        let sense = if plus { Sense::Plus } else { Sense::Minus };
        let angle = (deg as f64).to_radians();
        match kind {
            0 => GateSpec::TransitionCnot {
                control: p[0],
                target: p[1],
                sense,
                control_state: s,
            },
            1 => GateSpec::TransitionToffoli {
                controls: [p[0], p[1]],
                target: p[2],
            },
            2 => GateSpec::Rotation {
                spin: p[0],
                axis: Axis::ALL[s as usize + 1],
                angle,
            },
            3 => GateSpec::Cnot {
                control: p[0],
                target: p[1],
            },
            4 => GateSpec::Toffoli {
                controls: [p[0], p[1]],
                target: p[2],
            },
            5 => GateSpec::Fredkin {
                control: p[0],
                targets: [p[1], p[2]],
            },
            _ => GateSpec::TransitionRotation {
                controls: vec![(p[0], s)],
                target: p[1],
                angle,
                phase: angle / 2.0,
            },
        }
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn propagators_are_unitary_and_compose(h in hermitian(8), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let ua = expm_hermitian(&h, a).unwrap();
        let ub = expm_hermitian(&h, b).unwrap();
        let uab = expm_hermitian(&h, a + b).unwrap();
        prop_assert!(ua.is_unitary(1e-10));
        prop_assert!((&ua * &ub).max_abs_diff(&uab) <= 1e-10);
    }

    #[test]
    fn conjugation_keeps_spectrum(rho in hermitian(8), h in hermitian(8), a in -3.0f64..3.0) {
        let u = expm_hermitian(&h, a).unwrap();
        let out = apply_unitary(&rho, &u).unwrap();
        prop_assert!(out.is_hermitian(1e-12));
        prop_assert!((out.trace() - rho.trace()).norm() <= 1e-12);
        let x = hermitian_eigen(&rho).unwrap().sorted_values();
        let y = hermitian_eigen(&out).unwrap().sorted_values();
        for (p, q) in x.iter().zip(&y) {
            prop_assert!((p - q).abs() <= 1e-10);
        }
    }

    #[test]
    fn decomposition_round_trips(rho in hermitian(8)) {
        let d = decompose(&rho).unwrap();
        prop_assert!(compose(&d).unwrap().max_abs_diff(&rho) <= 1e-12);
        for t in &d.terms {
            let again = ProductTerm::<f64>::parse(&t.label(), 3, t.coefficient).unwrap();
            prop_assert_eq!(again.label(), t.label());
        }
    }

    #[test]
    fn two_spin_round_trip(rho in hermitian(4)) {
        let d = decompose(&rho).unwrap();
        prop_assert!(compose(&d).unwrap().max_abs_diff(&rho) <= 1e-12);
    }

    #[test]
    fn gate_text_round_trips(g in gate()) {
        let again = parse_gate::<f64>(&g.to_string()).unwrap();
        let (u, v) = (ideal_gate(&g, 3).unwrap(), ideal_gate(&again, 3).unwrap());
        prop_assert!(u.is_unitary(1e-12));
        prop_assert!(u.approx_eq(&v, 1e-12));
        prop_assert!(equivalence(&u, &v).unwrap().exact);
    }

    #[test]
    fn soft_pulses_split_in_time(
        sys in system(3),
        carrier in -800.0f64..800.0,
        amp in 0.0f64..40.0,
        phase in 0.0f64..360.0,
        dur in 1e-3f64..0.08,
        start in 0.0f64..0.05,
        frame in -200.0f64..200.0,
        frac in 0.05f64..0.95,
    ) {
        let p = |d: f64| SoftPulse::new(carrier, amp, phase, d).unwrap();
        let whole = soft_pulse_unitary(&sys, &p(dur), frame, start, 1.0).unwrap();
        let a = soft_pulse_unitary(&sys, &p(dur * frac), frame, start, 1.0).unwrap();
        let b = soft_pulse_unitary(&sys, &p(dur * (1.0 - frac)), frame, start + dur * frac, 1.0).unwrap();
        prop_assert!(whole.is_unitary(1e-10));
        prop_assert!((&b * &a).max_abs_diff(&whole) <= 1e-9);
    }

    #[test]
    fn spectra_are_linear_and_norm_preserving(
        f in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 256),
        g in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 256),
        a in -2.0f64..2.0,
    ) {
        let params = FidParams { dwell: 5e-4, points: 256, line_broadening: 0.0, observe: vec![1], receiver_offset: 0.0 };
        let f: Vec<C<f64>> = f.into_iter().map(|(x, y)| c(x, y)).collect();
        let g: Vec<C<f64>> = g.into_iter().map(|(x, y)| c(x, y)).collect();
        let mix: Vec<C<f64>> = f.iter().zip(&g).map(|(x, y)| x * a + y).collect();
        let (sf, sg, sm) = (spectrum(&f, &params).unwrap(), spectrum(&g, &params).unwrap(), spectrum(&mix, &params).unwrap());
        for i in 0..256 {
            prop_assert!((sm[i].value - (sf[i].value * a + sg[i].value)).norm() <= 1e-12);
        }
        let e_time: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        let e_freq: f64 = sf.iter().map(|p| p.value.norm_sqr()).sum();
        prop_assert!((e_time - e_freq).abs() <= 1e-9 * e_time.max(1.0));
    }

    #[test]
    fn configs_round_trip(sys in system(3)) {
        let mut cfg = Config::alanine_example();
        cfg.system.offsets_hz = sys.offsets().to_vec();
        cfg.system.j_hz = sys.couplings().to_vec();
        let again = Config::parse(&cfg.to_toml(), "rt").unwrap();
        let back = again.spin_system().unwrap();
        prop_assert_eq!(back.couplings(), sys.couplings());
        prop_assert_eq!(again, cfg);
    }
}

#[test]
fn angular_momentum_commutators() {
    let i = c(0.0, 1.0);
    for n in 1..=3 {
        for k in 1..=n {
            let x = angular_momentum::<f64>(Axis::X, k, n).unwrap();
            let y = angular_momentum::<f64>(Axis::Y, k, n).unwrap();
            let z = angular_momentum::<f64>(Axis::Z, k, n).unwrap();
            let comm = &(&x * &y) - &(&y * &x);
            assert!(comm.max_abs_diff(&z.scale(i)) <= 1e-15);
            for l in (1..=n).filter(|&l| l != k) {
                let zl = angular_momentum::<f64>(Axis::Z, l, n).unwrap();
                let c2 = &(&x * &zl) - &(&zl * &x);
                assert_eq!(c2.max_abs(), 0.0);
            }
        }
    }
}
