//! Sweep harness invariants on a small, fast grid.

use memvdp_core::dynamics::VdpParams;
use memvdp_core::sweep::*;

fn small_spec(couplings: &[f64], points: usize, t_end: f64) -> SweepSpec {
    let mut spec = SweepSpec::model_reference(couplings);
    spec.sweep_points = points;
    if let SweepMode::Model {
        alpha2_range,
        t_end: te,
        ..
    } = &mut spec.mode
    {
        *alpha2_range = (3.0, 4.2);
        *te = t_end;
    }
    spec
}

#[test]
fn zero_coupling_reproduces_the_uncoupled_mismatch() {
    let spec = small_spec(&[0.0], 5, 1500.0);
    let result = run_sweep(&spec).unwrap();
    for row in &result.curves[0].rows {
        assert!(!row.failed);
        // The coupled run with m = 0 is the uncoupled run.
        assert!(
            (row.delta_cap_f_norm - row.delta_f_norm).abs() < 1e-9,
            "identity violated at alpha2 = {}",
            row.swept_value
        );
    }
}

#[test]
fn identical_specs_give_identical_results() {
    let spec = small_spec(&[0.05], 3, 1200.0);
    let a = run_sweep(&spec).unwrap();
    let b = run_sweep(&spec).unwrap();
    assert_eq!(a.f0.to_bits(), b.f0.to_bits());
    for (ca, cb) in a.curves.iter().zip(&b.curves) {
        for (ra, rb) in ca.rows.iter().zip(&cb.rows) {
            assert_eq!(ra.f1_coupled.to_bits(), rb.f1_coupled.to_bits());
            assert_eq!(ra.f2_coupled.to_bits(), rb.f2_coupled.to_bits());
            assert_eq!(ra.locked, rb.locked);
        }
    }
}

#[test]
fn locked_points_nest_with_growing_coupling() {
    let spec = small_spec(&[0.05, 0.1], 7, 1500.0);
    let result = run_sweep(&spec).unwrap();
    let weak = &result.curves[0].rows;
    let strong = &result.curves[1].rows;
    for i in 0..weak.len() {
        if weak[i].locked {
            // One grid point of slack at the tongue boundary.
            let neighborhood = strong[i.saturating_sub(1)..(i + 2).min(strong.len())]
                .iter()
                .any(|r| r.locked);
            assert!(neighborhood, "point {i} locked at m=0.05 but not near it at m=0.1");
        }
    }
    assert!(weak.iter().any(|r| r.locked));
}

#[test]
fn locked_rows_satisfy_the_frequency_tolerance() {
    let spec = small_spec(&[0.1], 5, 1500.0);
    let result = run_sweep(&spec).unwrap();
    for row in &result.curves[0].rows {
        if row.locked {
            assert!(row.delta_cap_f_norm.abs() < spec.freq_tol);
        }
    }
}

#[test]
fn locking_range_covers_the_reference_detuning() {
    let spec = small_spec(&[0.1], 7, 1500.0);
    let result = run_sweep(&spec).unwrap();
    let range = locking_range(&result, 0).expect("at least one locked point");
    // The swept range straddles the matched point alpha2 = alpha1, so the
    // locked interval of normalized detunings contains zero.
    assert!(range.width() > 0.0);
    assert!(range.min < 0.0 && range.max > 0.0);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = SweepSpec::model_reference(&[0.1]);
    spec.sweep_points = 1;
    assert!(spec.validate().is_err());
    let spec = SweepSpec::model_reference(&[]);
    assert!(spec.validate().is_err());
    let _ = VdpParams::reference();
}
