//! Invariants of the binary resistive device, checked against an independent
//! reference interpreter.

use memvdp_core::memristor::*;
use proptest::prelude::*;

/// Reference interpreter: walks a waveform segment by segment, tracking only
/// whether the relevant threshold has been exceeded continuously for the
/// dwell time. Written from the behavioral description, not from the device
/// implementation.
fn reference_events(
    waveform: &[(f64, f64)],
    v_set: f64,
    v_reset: f64,
    tau: f64,
    r_per_set: f64,
) -> Vec<(usize, Option<SwitchEvent>)> {
    #[derive(PartialEq)]
    enum S {
        High,
        Low,
    }
    let mut state = S::High;
    let mut held = 0.0f64;
    let mut out = Vec::new();
    for (idx, &(v, dt)) in waveform.iter().enumerate() {
        let over = match state {
            S::High => v >= v_set,
            S::Low => v <= v_reset,
        };
        let mut ev = None;
        if over {
            held += dt;
            if held >= tau {
                held = 0.0;
                ev = match state {
                    S::High => {
                        state = S::Low;
                        Some(SwitchEvent::Set { r_lrs: r_per_set })
                    }
                    S::Low => {
                        state = S::High;
                        Some(SwitchEvent::Reset)
                    }
                };
            }
        } else {
            held = 0.0;
        }
        out.push((idx, ev));
    }
    out
}

fn arb_waveform() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, 0.1e-6..3e-6f64), 1..100)
}

proptest! {
    #[test]
    fn event_sequence_matches_reference_interpreter(waveform in arb_waveform()) {
        let mut dev = MemristorDevice::default();
        let pts = dev.iv_sweep(&waveform);
        let expected = reference_events(
            &waveform,
            0.6,
            -0.3,
            1e-6,
            lrs_from_compliance(dev.i_cc, dev.k_lrs).unwrap(),
        );
        for ((idx, want), got) in expected.iter().zip(&pts) {
            prop_assert_eq!(*want, got.event, "segment {}", idx);
        }
    }

    #[test]
    fn sweeps_through_zero_volts_carry_zero_current(waveform in arb_waveform()) {
        let mut dev = MemristorDevice::default();
        for p in dev.iv_sweep(&waveform) {
            if p.v == 0.0 {
                prop_assert_eq!(p.i, 0.0);
            }
            prop_assert!(p.i.abs() <= dev.i_cc);
        }
    }

    #[test]
    fn compliance_law_is_strictly_decreasing(
        i_lo in 1e-5..1e-2f64,
        factor in 1.01..100.0f64,
    ) {
        let i_hi = i_lo * factor;
        let r_lo = lrs_from_compliance(i_lo, 0.5).unwrap();
        let r_hi = lrs_from_compliance(i_hi, 0.5).unwrap();
        prop_assert!(r_hi < r_lo);
    }

    #[test]
    fn set_requires_the_high_resistance_precondition(waveform in arb_waveform()) {
        let mut dev = MemristorDevice::default();
        let mut in_lrs = false;
        for &(v, dt) in &waveform {
            match dev.apply_voltage(v, dt) {
                Some(SwitchEvent::Set { .. }) => {
                    prop_assert!(!in_lrs, "SET fired while already in LRS");
                    in_lrs = true;
                }
                Some(SwitchEvent::Reset) => {
                    prop_assert!(in_lrs, "RESET fired while already in HRS");
                    in_lrs = false;
                }
                None => {}
            }
        }
    }
}
