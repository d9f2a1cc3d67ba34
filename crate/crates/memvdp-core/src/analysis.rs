//! Spike extraction and synchronization analysis.
//!
//! Frequencies are estimated from the median inter-spike interval rather
//! than an FFT: the waveforms are sparse nonsinusoidal spike trains, and the
//! median is robust to single transient cycles.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::SimError;

/// Default relative frequency mismatch below which two trains count as
/// frequency locked.
pub const DEFAULT_FREQ_TOL: f64 = 0.005;
/// Default bound on the unwrapped phase-difference range for phase locking.
pub const DEFAULT_PHASE_TOL: f64 = 0.2 * 2.0 * PI;

/// Ordered event times extracted from one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrain {
    pub times: Vec<f64>,
}

impl SpikeTrain {
    pub fn new(times: Vec<f64>) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]));
        Self { times }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Times restricted to [t0, t1].
    pub fn window(&self, t0: f64, t1: f64) -> SpikeTrain {
        SpikeTrain {
            times: self
                .times
                .iter()
                .copied()
                .filter(|&t| t >= t0 && t <= t1)
                .collect(),
        }
    }
}

/// Upward threshold crossings of a sampled channel, linearly interpolated
/// between samples. Crossings within `refractory` of the previous accepted
/// spike are ignored.
pub fn detect_spikes<I>(samples: I, threshold: f64, refractory: f64) -> SpikeTrain
where
    I: IntoIterator<Item = (f64, f64)>,
{
    debug_assert!(refractory > 0.0);
    let mut times = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut last_spike = f64::NEG_INFINITY;
    for (t, y) in samples {
        if let Some((tp, yp)) = prev {
            if yp < threshold && y >= threshold {
                let frac = (threshold - yp) / (y - yp);
                let tc = tp + frac * (t - tp);
                if tc - last_spike >= refractory {
                    times.push(tc);
                    last_spike = tc;
                }
            }
        }
        prev = Some((t, y));
    }
    SpikeTrain { times }
}

/// Frequency as the reciprocal median inter-spike interval over [t0, t1].
/// Needs at least 3 spikes in the window.
pub fn estimate_frequency(train: &SpikeTrain, t0: f64, t1: f64) -> Result<f64, SimError> {
    let w = train.window(t0, t1);
    if w.len() < 3 {
        return Err(SimError::InsufficientSpikes {
            needed: 3,
            got: w.len(),
        });
    }
    let mut intervals: Vec<f64> = w.times.windows(2).map(|p| p[1] - p[0]).collect();
    Ok(1.0 / median(&mut intervals))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(|a, b| a.partial_cmp(b).expect("non-finite interval"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Per-cycle phase of `other` relative to `ref_train` over [t0, t1].
///
/// For each reference spike tᵢ with successor tᵢ₊₁, the phase of the first
/// other-spike inside [tᵢ, tᵢ₊₁) is 2π (t_other − tᵢ) / (tᵢ₊₁ − tᵢ).
/// Reference periods containing no other-spike are skipped. All values lie
/// in [0, 2π).
pub fn phase_difference(
    ref_train: &SpikeTrain,
    other: &SpikeTrain,
    t0: f64,
    t1: f64,
) -> Result<Vec<f64>, SimError> {
    let r = ref_train.window(t0, t1);
    let o = other.window(t0, t1);
    if r.len() < 2 || o.len() < 2 {
        return Err(SimError::InsufficientSpikes {
            needed: 2,
            got: r.len().min(o.len()),
        });
    }
    let mut phases = Vec::new();
    let mut j = 0;
    for pair in r.times.windows(2) {
        let (ti, ti1) = (pair[0], pair[1]);
        while j < o.times.len() && o.times[j] < ti {
            j += 1;
        }
        if j < o.times.len() && o.times[j] < ti1 {
            let phase = 2.0 * PI * (o.times[j] - ti) / (ti1 - ti);
            // Interpolated spike times can land an ulp past the period end.
            phases.push(phase.clamp(0.0, 2.0 * PI - f64::EPSILON));
        }
    }
    Ok(phases)
}

/// Unwrap a phase sequence by nearest-multiple-of-2π continuation.
pub fn unwrap_phases(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &p in phases {
        if let Some(pv) = prev {
            let mut candidate = p + offset;
            while candidate - pv > PI {
                offset -= 2.0 * PI;
                candidate = p + offset;
            }
            while candidate - pv < -PI {
                offset += 2.0 * PI;
                candidate = p + offset;
            }
        }
        let v = p + offset;
        out.push(v);
        prev = Some(v);
    }
    out
}

/// Lock verdict together with the quantities it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct LockReport {
    pub f1: f64,
    pub f2: f64,
    pub delta_f_rel: f64,
    pub phase_diffs: Vec<f64>,
    pub phase_range: f64,
    pub locked: bool,
}

/// Frequency- and phase-lock verdict over [t0, t1].
///
/// Locked means relative mismatch below `freq_tol` and unwrapped phase range
/// below `phase_tol`.
pub fn is_locked(
    train1: &SpikeTrain,
    train2: &SpikeTrain,
    t0: f64,
    t1: f64,
    freq_tol: f64,
    phase_tol: f64,
) -> Result<LockReport, SimError> {
    let f1 = estimate_frequency(train1, t0, t1)?;
    let f2 = estimate_frequency(train2, t0, t1)?;
    let delta_f_rel = (f1 - f2).abs() / f1.max(f2);
    let phase_diffs = phase_difference(train1, train2, t0, t1)?;
    let unwrapped = unwrap_phases(&phase_diffs);
    let phase_range = range(&unwrapped);
    Ok(LockReport {
        f1,
        f2,
        delta_f_rel,
        phase_range,
        locked: delta_f_rel < freq_tol && phase_range < phase_tol,
        phase_diffs,
    })
}

fn range(values: &[f64]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if values.is_empty() {
        0.0
    } else {
        hi - lo
    }
}

/// Sample index ranges of one channel's cycles: cycle k spans from spike k to
/// spike k+1 on the reference channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
}

/// Segment a uniformly sampled trace (given its sample times) into cycles
/// bounded by consecutive spikes of the reference train. Needs >= 2 spikes.
pub fn cycle_segment(sample_times: &[f64], ref_train: &SpikeTrain) -> Result<Vec<Cycle>, SimError> {
    if ref_train.len() < 2 {
        return Err(SimError::InsufficientSpikes {
            needed: 2,
            got: ref_train.len(),
        });
    }
    let mut cycles = Vec::with_capacity(ref_train.len() - 1);
    for pair in ref_train.times.windows(2) {
        let start = lower_bound(sample_times, pair[0]);
        let end = lower_bound(sample_times, pair[1]);
        if start < end {
            cycles.push(Cycle {
                start,
                end,
                t_start: pair[0],
                t_end: pair[1],
            });
        }
    }
    Ok(cycles)
}

fn lower_bound(times: &[f64], t: f64) -> usize {
    times.partition_point(|&x| x < t)
}

/// Endpoint gap of a planar cycle relative to its diameter: small values mean
/// the cycle closes on itself in the (a, b) plane.
pub fn cycle_closure_ratio(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let first = points[0];
    let last = points[points.len() - 1];
    let gap = dist(first, last);
    let mut diameter = 0.0f64;
    // Diameter via bounding box diagonal; adequate for a closure metric.
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in points {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    let dx = xmax - xmin;
    let dy = ymax - ymin;
    diameter = diameter.max(libm::sqrt(dx * dx + dy * dy));
    if diameter == 0.0 {
        0.0
    } else {
        gap / diameter
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    libm::sqrt((a.0 - b.0) * (a.0 - b.0) + (a.1 - b.1) * (a.1 - b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn periodic_train(period: f64, n: usize, offset: f64) -> SpikeTrain {
        SpikeTrain::new((0..n).map(|i| offset + i as f64 * period).collect())
    }

    /// Rectangular pulse train sampled at `dt`: the synthetic generator used
    /// to round-trip detect_spikes.
    fn sampled_pulses(times: &[f64], width: f64, dt: f64, t_end: f64) -> Vec<(f64, f64)> {
        let n = (t_end / dt) as usize;
        (0..=n)
            .map(|i| {
                let t = i as f64 * dt;
                let inside = times.iter().any(|&s| t >= s && t < s + width);
                (t, if inside { 1.0 } else { 0.0 })
            })
            .collect()
    }

    #[test]
    fn constant_channel_yields_no_spikes() {
        let samples = (0..100).map(|i| (i as f64, 0.0));
        assert!(detect_spikes(samples, 0.5, 1.0).is_empty());
    }

    #[test]
    fn synthetic_540_hz_train_recovers_period() {
        let period = 1.0 / 540.0;
        let times: Vec<f64> = (1..30).map(|i| i as f64 * period).collect();
        let dt = 2e-6;
        let samples = sampled_pulses(&times, 100e-6, dt, 30.0 * period);
        let detected = detect_spikes(samples.into_iter(), 0.5, period / 2.0);
        assert_eq!(detected.len(), times.len());
        for w in detected.times.windows(2) {
            assert!((w[1] - w[0] - period).abs() <= dt);
        }
    }

    #[test]
    fn refractory_suppresses_double_counting() {
        let samples = vec![
            (0.0, 0.0),
            (1.0, 1.0),
            (1.1, 0.0),
            (1.2, 1.0),
            (2.0, 0.0),
            (5.0, 1.0),
        ];
        let t = detect_spikes(samples.into_iter(), 0.5, 2.0);
        assert_eq!(t.len(), 2);
    }

    #[test]
    fn frequency_of_unit_spaced_spikes() {
        let train = SpikeTrain::new(vec![0.0, 1.0, 2.0, 3.0]);
        assert_eq!(estimate_frequency(&train, 0.0, 3.0), Ok(1.0));
    }

    #[test]
    fn median_interval_ignores_single_outlier() {
        let train = SpikeTrain::new(vec![0.0, 1.0, 2.0, 10.0]);
        assert_eq!(estimate_frequency(&train, 0.0, 10.0), Ok(1.0));
    }

    #[test]
    fn too_few_spikes_is_an_error() {
        let train = SpikeTrain::new(vec![0.0, 1.0]);
        assert_eq!(
            estimate_frequency(&train, 0.0, 1.0),
            Err(SimError::InsufficientSpikes { needed: 3, got: 2 })
        );
    }

    #[test]
    fn identical_trains_have_zero_phase() {
        let a = periodic_train(1.0, 10, 0.0);
        let phases = phase_difference(&a, &a, 0.0, 10.0).unwrap();
        assert!(!phases.is_empty());
        assert!(phases.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn half_period_delay_reads_pi() {
        let a = periodic_train(1.0, 10, 0.0);
        let b = periodic_train(1.0, 10, 0.5);
        let phases = phase_difference(&a, &b, 0.0, 10.0).unwrap();
        for p in phases {
            assert!((p - PI).abs() < 1e-12);
        }
    }

    #[test]
    fn phases_stay_in_range() {
        let a = periodic_train(1.0, 50, 0.0);
        let b = periodic_train(1.37, 40, 0.2);
        let phases = phase_difference(&a, &b, 0.0, 60.0).unwrap();
        for p in phases {
            assert!((0.0..2.0 * PI).contains(&p), "phase {p} out of range");
        }
    }

    #[test]
    fn unwrap_continues_across_wraparound() {
        let wrapped = vec![6.0, 6.2, 0.1, 0.3];
        let u = unwrap_phases(&wrapped);
        assert!((u[2] - (0.1 + 2.0 * PI)).abs() < 1e-12);
        assert!((u[3] - (0.3 + 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn identical_trains_lock() {
        let a = periodic_train(1.0, 20, 0.0);
        let r = is_locked(&a, &a.clone(), 0.0, 20.0, DEFAULT_FREQ_TOL, DEFAULT_PHASE_TOL).unwrap();
        assert!(r.locked);
        assert_eq!(r.delta_f_rel, 0.0);
    }

    #[test]
    fn mismatched_frequencies_do_not_lock() {
        let a = periodic_train(1.0 / 540.0, 200, 0.0);
        let b = periodic_train(1.0 / 410.0, 160, 0.0);
        let r = is_locked(&a, &b, 0.0, 0.3, DEFAULT_FREQ_TOL, DEFAULT_PHASE_TOL).unwrap();
        assert!(!r.locked);
        assert!((r.delta_f_rel - 130.0 / 540.0).abs() < 1e-6);
    }

    #[test]
    fn spike_count_to_cycle_count() {
        let times: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let two = SpikeTrain::new(vec![1.05, 2.05]);
        assert_eq!(cycle_segment(&times, &two).unwrap().len(), 1);
        let five = SpikeTrain::new(vec![1.05, 2.05, 3.05, 4.05, 5.05]);
        assert_eq!(cycle_segment(&times, &five).unwrap().len(), 4);
        let one = SpikeTrain::new(vec![1.05]);
        assert!(cycle_segment(&times, &one).is_err());
    }

    #[test]
    fn closure_ratio_distinguishes_open_and_closed() {
        // Closed square path.
        let closed = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.0, 0.01)];
        assert!(cycle_closure_ratio(&closed) < 0.05);
        // Open "L" path.
        let open = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)];
        assert!(cycle_closure_ratio(&open) > 0.5);
    }
}
