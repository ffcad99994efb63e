//! Coarse-grid scan followed by golden-section refinement for 1-d maxima.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of `f` on [a, b].
/// Returns (argmax, max) once the bracket is narrower than `x_tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc > fd {
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
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Evaluate `f` on a grid over [a, b] with the given step, then refine the
/// best bracket by golden section to `x_tol`.
pub fn grid_then_golden_max<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    step: f64,
    x_tol: f64,
) -> (f64, f64) {
    let n = ((b - a) / step).ceil() as usize;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n {
        let x = (a + i as f64 * step).min(b);
        let v = f(x);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = a + best_i.saturating_sub(1) as f64 * step;
    let hi = (a + (best_i + 1) as f64 * step).min(b);
    let (x, v) = golden_section_max(&f, lo, hi, x_tol);
    if v >= best {
        (x, v)
    } else {
        ((a + best_i as f64 * step).min(b), best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let (x, v) = golden_section_max(|x| -(x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-9);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn grid_scan_escapes_local_maxima() {
        // two bumps, the taller one near x = 7
        let f = |x: f64| (-(x - 2.0).powi(2)).exp() + 1.5 * (-(x - 7.0).powi(2)).exp();
        let (x, _) = grid_then_golden_max(f, 0.0, 10.0, 0.05, 1e-8);
        assert!((x - 7.0).abs() < 1e-5);
    }
}
