//! Peak and dip analysis of sampled line shapes.

/// A local maximum located by quadratic interpolation through the sample
/// and its two neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub x: f64,
    pub height: f64,
}

/// Strict interior local maxima of `y` whose height is at least
/// `min_rel` times the global maximum.
pub fn local_maxima(x: &[f64], y: &[f64], min_rel: f64) -> Vec<Peak> {
    assert_eq!(x.len(), y.len());
    let ymax = y.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let mut out = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        // `>=` on the left so flat-topped plateaus yield one peak.
        if y[k] >= y[k - 1] && y[k] > y[k + 1] && y[k] >= min_rel * ymax {
            let (xp, yp) = parabola_vertex(
                [x[k - 1], x[k], x[k + 1]],
                [y[k - 1], y[k], y[k + 1]],
            );
            out.push(Peak {
                index: k,
                x: xp,
                height: yp,
            });
        }
    }
    out
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when they are collinear.
pub fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let a = (d2 - d1) / (x[2] - x[0]);
    if a == 0.0 || !a.is_finite() {
        return (x[1], y[1]);
    }
    let b = d1 - a * (x[0] + x[1]);
    let xv = (-b / (2.0 * a)).clamp(x[0], x[2]);
    // Newton form: p(x) = y0 + d1 (x − x0) + a (x − x0)(x − x1)
    let yv = y[0] + d1 * (xv - x[0]) + a * (xv - x[0]) * (xv - x[1]);
    (xv, yv)
}

fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (x0 + x1);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Full width at half maximum of the peak at `index`, walking outwards to
/// the first half-height crossing on each side. `None` if either side never
/// drops below half height.
pub fn fwhm(x: &[f64], y: &[f64], index: usize) -> Option<f64> {
    let half = 0.5 * y[index];
    let mut l = index;
    while l > 0 && y[l] > half {
        l -= 1;
    }
    if y[l] > half {
        return None;
    }
    let mut r = index;
    while r + 1 < y.len() && y[r] > half {
        r += 1;
    }
    if y[r] > half {
        return None;
    }
    let xl = crossing(x[l], y[l], x[l + 1], y[l + 1], half);
    let xr = crossing(x[r - 1], y[r - 1], x[r], y[r], half);
    Some(xr - xl)
}

/// A dip at `index` whose depth is measured against the nearest local
/// maxima (shoulders) on either side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub index: usize,
    pub bottom: f64,
    /// Lower of the two shoulder heights.
    pub shoulder: f64,
    /// Full width at half depth.
    pub width: f64,
}

/// Characterises the dip around the minimum of `y` nearest `x_center`.
/// Returns `None` when no shoulder rises above the bottom on both sides.
pub fn dip_near(x: &[f64], y: &[f64], x_center: f64) -> Option<Dip> {
    let n = y.len();
    if n < 3 {
        return None;
    }
    let mut k = (0..n)
        .min_by(|&a, &b| (x[a] - x_center).abs().total_cmp(&(x[b] - x_center).abs()))?;
    // Slide downhill to the local minimum.
    loop {
        if k > 0 && y[k - 1] < y[k] {
            k -= 1;
        } else if k + 1 < n && y[k + 1] < y[k] {
            k += 1;
        } else {
            break;
        }
    }
    let mut l = k;
    while l > 0 && y[l - 1] >= y[l] {
        l -= 1;
    }
    let mut r = k;
    while r + 1 < n && y[r + 1] >= y[r] {
        r += 1;
    }
    let bottom = y[k];
    let shoulder = y[l].min(y[r]);
    if !(shoulder > bottom) {
        return None;
    }
    let level = 0.5 * (bottom + shoulder);
    let mut a = k;
    while a > l && y[a] < level {
        a -= 1;
    }
    let mut b = k;
    while b < r && y[b] < level {
        b += 1;
    }
    let xl = crossing(x[a], y[a], x[a + 1], y[a + 1], level);
    let xr = crossing(x[b - 1], y[b - 1], x[b], y[b], level);
    Some(Dip {
        index: k,
        bottom,
        shoulder,
        width: xr - xl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn lorentzian_fwhm() {
        let x = grid(-20.0, 20.0, 4001);
        let y: Vec<f64> = x.iter().map(|&v| 1.0 / (1.0 + (v / 1.5).powi(2))).collect();
        let p = local_maxima(&x, &y, 0.5);
        assert_eq!(p.len(), 1);
        assert!(p[0].x.abs() < 1e-9);
        assert!((fwhm(&x, &y, p[0].index).unwrap() - 3.0).abs() < 1e-4);
    }

    #[test]
    fn vertex_recovers_offset_peak() {
        let f = |v: f64| 2.0 - (v - 0.3).powi(2);
        let (xv, yv) = parabola_vertex([0.0, 0.5, 1.0], [f(0.0), f(0.5), f(1.0)]);
        assert!((xv - 0.3).abs() < 1e-12);
        assert!((yv - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_peaks_and_dip() {
        let x = grid(-10.0, 10.0, 2001);
        let l = |v: f64, c: f64| 1.0 / (1.0 + ((v - c) / 0.5).powi(2));
        let y: Vec<f64> = x.iter().map(|&v| l(v, -4.0) + l(v, 4.0)).collect();
        let p = local_maxima(&x, &y, 0.1);
        assert_eq!(p.len(), 2);
        assert!((p[0].x + 4.0).abs() < 1e-2 && (p[1].x - 4.0).abs() < 1e-2);
        let d = dip_near(&x, &y, 0.0).unwrap();
        assert_eq!(x[d.index], 0.0);
        assert!(d.width > 6.0 && d.width < 8.0);
    }

    #[test]
    fn no_dip_on_monotone() {
        let x = grid(0.0, 1.0, 11);
        assert!(dip_near(&x, &x, 0.5).is_none());
    }
}
