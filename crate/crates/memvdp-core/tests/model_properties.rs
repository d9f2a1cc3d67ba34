//! Structural invariants of the coupled oscillator model.

use memvdp_core::dynamics::*;
use proptest::prelude::*;

fn short_sim(params: &VdpParams, init: OscPairState, m: f64) -> Trace {
    let opts = SimOptions::new(5.0).with_dt(1e-3).with_stride(10);
    simulate(params, CouplingSchedule::constant(m).into(), init, &opts).unwrap()
}

fn arb_params() -> impl Strategy<Value = VdpParams> {
    (
        0.5..6.0f64,
        0.5..6.0f64,
        0.01..0.5f64,
        0.01..0.5f64,
        1.0..5.0f64,
        1.0..5.0f64,
    )
        .prop_map(|(alpha1, alpha2, beta1, beta2, gamma1, gamma2)| VdpParams {
            alpha1,
            alpha2,
            beta1,
            beta2,
            gamma1,
            gamma2,
            cubic_sign: CubicSign::Negative,
        })
}

fn arb_state() -> impl Strategy<Value = OscPairState> {
    (-2.0..2.0f64, -3.0..3.0f64, -2.0..2.0f64, -3.0..3.0f64)
        .prop_map(|(x1, v1, x2, v2)| OscPairState::new(0.0, x1, v1, x2, v2))
}

proptest! {
    #[test]
    fn coupling_terms_are_exactly_antisymmetric(
        params in arb_params(),
        state in arb_state(),
        m in 0.0..1.0f64,
    ) {
        let with = vdp_rhs(&state, &params, m);
        let without = vdp_rhs(&state, &params, 0.0);
        // The same coupling term enters the two accelerations with opposite
        // sign, bit for bit.
        let c = m * (state.x2 - state.x1);
        prop_assert_eq!(with.dv1, without.dv1 + c);
        prop_assert_eq!(with.dv2, without.dv2 - c);
        prop_assert_eq!(c + -c, 0.0);
    }

    #[test]
    fn swapping_oscillator_roles_swaps_trajectories(
        params in arb_params(),
        state in arb_state(),
        m in 0.0..0.5f64,
    ) {
        let swapped_init = OscPairState::new(state.t, state.x2, state.v2, state.x1, state.v1);
        let a = short_sim(&params, state, m);
        let b = short_sim(&params.swapped(), swapped_init, m);
        prop_assert_eq!(a.samples.len(), b.samples.len());
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            prop_assert_eq!(sa.t, sb.t);
            prop_assert_eq!(sa.x1, sb.x2);
            prop_assert_eq!(sa.v1, sb.v2);
            prop_assert_eq!(sa.x2, sb.x1);
            prop_assert_eq!(sa.v2, sb.v1);
        }
    }

    #[test]
    fn identical_oscillators_stay_on_the_sync_manifold(
        alpha in 0.5..6.0f64,
        x in -2.0..2.0f64,
        v in -2.0..2.0f64,
        m in 0.0..1.0f64,
    ) {
        let params = VdpParams {
            alpha1: alpha,
            alpha2: alpha,
            ..VdpParams::reference()
        };
        let init = OscPairState::new(0.0, x, v, x, v);
        let trace = short_sim(&params, init, m);
        for s in &trace.samples {
            prop_assert!((s.x1 - s.x2).abs() < 1e-12);
            prop_assert!((s.v1 - s.v2).abs() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_oscillator_ignores_its_partner(
        params in arb_params(),
        state in arb_state(),
        other_x in -2.0..2.0f64,
        other_v in -3.0..3.0f64,
    ) {
        let altered = OscPairState::new(state.t, state.x1, state.v1, other_x, other_v);
        let a = short_sim(&params, state, 0.0);
        let b = short_sim(&params, altered, 0.0);
        for (sa, sb) in a.samples.iter().zip(&b.samples) {
            // Bit-identical, not approximately equal.
            prop_assert_eq!(sa.x1.to_bits(), sb.x1.to_bits());
            prop_assert_eq!(sa.v1.to_bits(), sb.v1.to_bits());
        }
    }
}

#[test]
fn schedule_switch_is_right_continuous() {
    let s = CouplingSchedule::new(0.01, 0.1, 1500.0);
    assert_eq!(s.coupling_at(1500.0 - 1e-9), 0.01);
    assert_eq!(s.coupling_at(1500.0), 0.1);
}

#[test]
fn reference_run_is_deterministic() {
    let params = VdpParams::reference();
    let schedule = CouplingSchedule::new(0.01, 0.1, 50.0);
    let opts = SimOptions::new(100.0).with_dt(1e-3).with_stride(20);
    let run = || simulate(&params, schedule.into(), OscPairState::default_init(), &opts).unwrap();
    let (a, b) = (run(), run());
    assert_eq!(a.samples.len(), b.samples.len());
    for (sa, sb) in a.samples.iter().zip(&b.samples) {
        assert_eq!(
            (sa.x1.to_bits(), sa.v1.to_bits(), sa.x2.to_bits(), sa.v2.to_bits()),
            (sb.x1.to_bits(), sb.v1.to_bits(), sb.x2.to_bits(), sb.v2.to_bits())
        );
    }
}
