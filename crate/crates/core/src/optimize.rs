//! One-dimensional maximisation and grid helpers.

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(argmax, max)`; stops when the bracket is narrower than
/// `tol · max(1, |x|)`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..300 {
        if (b - a).abs() <= tol * c.abs().max(1.0) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // Compare against the end points so monotone objectives report the edge.
    let (fa, fb) = (f(lo), f(hi));
    let (mut x, mut v) = if fc >= fd { (c, fc) } else { (d, fd) };
    if fa > v {
        x = lo;
        v = fa;
    }
    if fb > v {
        x = hi;
        v = fb;
    }
    (x, v)
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = linear_grid(lo.ln(), hi.ln(), points).into_iter().map(f64::exp).collect();
    // Pin the end points exactly; exp(ln x) can be off by an ulp.
    if let Some(first) = grid.first_mut() {
        *first = lo;
    }
    if points > 1 {
        grid[points - 1] = hi;
    }
    grid
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        n => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, v) = golden_section_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, -5.0, 5.0, 1e-10);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_objective_reports_edge() {
        let (x, _) = golden_section_max(|x| -x, 0.5, 3.0, 1e-9);
        assert_eq!(x, 0.5);
    }

    #[test]
    fn grids_hit_end_points() {
        let g = log_grid(1e3, 1e7, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 1e3);
        assert_eq!(g[4], 1e7);
        assert!((g[2] - 1e5).abs() < 1e-6);
        assert_eq!(linear_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
