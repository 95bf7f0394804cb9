use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Sliding-window photon counts, each stamped with the end of its window.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WindowedSeries {
    pub times: Vec<f64>,
    pub counts: Vec<u32>,
}

/// A maximal run of windows whose count is below threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionEvent {
    /// End time of the first sub-threshold window.
    pub start: f64,
    /// End time of the last sub-threshold window.
    pub end: f64,
}

/// Counts clicks in windows `[t - window, t)` for `t = start + window,
/// start + window + stride, ...` up to `end`. `click_times` must be sorted.
pub fn windowed_counts(
    click_times: &[f64],
    window: f64,
    stride: f64,
    start: f64,
    end: f64,
) -> Result<WindowedSeries> {
    if !(stride > 0.0 && stride <= window) {
        return Err(invalid("stride", format!("must lie in (0, window], got {stride}")));
    }
    let mut series = WindowedSeries::default();
    let mut k = 0usize;
    loop {
        let t = start + window + k as f64 * stride;
        if t > end {
            break;
        }
        let hi = click_times.partition_point(|&c| c < t);
        let lo = click_times.partition_point(|&c| c < t - window);
        series.times.push(t);
        series.counts.push((hi - lo) as u32);
        k += 1;
    }
    Ok(series)
}

/// One event per maximal excursion strictly below `threshold`.
pub fn detect_events(series: &WindowedSeries, threshold: u32) -> Vec<DetectionEvent> {
    let mut events = Vec::new();
    let mut current: Option<DetectionEvent> = None;
    for (&t, &c) in series.times.iter().zip(&series.counts) {
        if c < threshold {
            match current.as_mut() {
                Some(ev) => ev.end = t,
                None => current = Some(DetectionEvent { start: t, end: t }),
            }
        } else if let Some(ev) = current.take() {
            events.push(ev);
        }
    }
    events.extend(current);
    events
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(counts: &[u32]) -> WindowedSeries {
        WindowedSeries {
            times: (0..counts.len()).map(|i| i as f64).collect(),
            counts: counts.to_vec(),
        }
    }

    #[test]
    fn no_clicks_all_zero() {
        let s = windowed_counts(&[], 8.0, 1.0, 0.0, 20.0).unwrap();
        assert_eq!(s.counts.len(), 13);
        assert!(s.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn counts_are_half_open() {
        let s = windowed_counts(&[0.0, 1.0, 2.0, 3.0], 2.0, 1.0, 0.0, 4.0).unwrap();
        assert_eq!(s.times, vec![2.0, 3.0, 4.0]);
        assert_eq!(s.counts, vec![2, 2, 2]);
    }

    #[test]
    fn stride_longer_than_window_rejected() {
        assert!(windowed_counts(&[], 1.0, 2.0, 0.0, 10.0).is_err());
    }

    #[test]
    fn never_below_threshold() {
        assert!(detect_events(&series(&[20, 15, 11, 30]), 11).is_empty());
    }

    #[test]
    fn single_dip_is_one_event() {
        let ev = detect_events(&series(&[20, 10, 3, 0, 5, 12, 20]), 11);
        assert_eq!(ev, vec![DetectionEvent { start: 1.0, end: 4.0 }]);
    }

    #[test]
    fn separate_dips_and_trailing_excursion() {
        let ev = detect_events(&series(&[5, 20, 4, 4]), 11);
        assert_eq!(ev.len(), 2);
        assert_eq!(ev[0], DetectionEvent { start: 0.0, end: 0.0 });
        assert_eq!(ev[1], DetectionEvent { start: 2.0, end: 3.0 });
    }

    #[test]
    fn threshold_zero_never_fires() {
        assert!(detect_events(&series(&[0, 0, 0]), 0).is_empty());
    }
}
