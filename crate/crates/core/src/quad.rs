//! Radial quadrature on the node set `r_k = (k + 1) h`, `k = 0..n`.

/// Estimate of `∫_{r_max}^∞ phi` from samples near the grid end.
///
/// First tries `phi ~ A r^{-2} + B r^{-4}`, the exact tail of a free wave
/// whose profile has compact support, fitted at `r_max / 2` and `r_max` and
/// validated at `3 r_max / 4`. Otherwise falls back to a single power
/// `C r^{-p}` from the last two samples, and to 0 unless `p > 1`.
pub(crate) fn power_tail(h: f64, phi: &[f64]) -> f64 {
    let n = phi.len();
    if n < 2 {
        return 0.0;
    }
    let r_at = |k: usize| (k + 1) as f64 * h;
    if n >= 8 && n % 4 == 0 {
        let (i1, ih, i3) = (n - 1, n / 2 - 1, 3 * n / 4 - 1);
        let (r1, y1, yh, y3) = (r_at(i1), phi[i1], phi[ih], phi[i3]);
        // In x = r / r_max: A' + B' = y1, 4A' + 16B' = yh.
        let b = (yh - 4.0 * y1) / 12.0;
        let a = y1 - b;
        let x3: f64 = 0.75;
        let pred = a * x3.powi(-2) + b * x3.powi(-4);
        if a >= 0.0 && b >= 0.0 && y3 > 0.0 && (pred - y3).abs() <= 1e-3 * y3 {
            return r1 * (a + b / 3.0);
        }
    }
    let (a, b) = (phi[n - 2], phi[n - 1]);
    if !(a > 0.0 && b > 0.0) {
        return 0.0;
    }
    let (ra, rb) = (r_at(n - 2), r_at(n - 1));
    let p = (a / b).ln() / (rb / ra).ln();
    if p.is_finite() && p > 1.05 {
        b * rb / (p - 1.0)
    } else {
        0.0
    }
}

/// Trapezoid rule for `∫_{r_from}^{r_max} phi`, with `phi(0) = 0` assumed
/// for the first cell, plus the power-law tail when `closure` is set.
pub(crate) fn radial_integral(h: f64, phi: &[f64], r_from: f64, closure: bool) -> f64 {
    let n = phi.len();
    if n == 0 {
        return 0.0;
    }
    let r_max = n as f64 * h;
    let tail = if closure { power_tail(h, phi) } else { 0.0 };
    if r_from >= r_max {
        return tail;
    }
    let at = |k: usize| if k == 0 { 0.0 } else { phi[k - 1] };
    let x = (r_from / h).max(0.0);
    let i = x.floor() as usize;
    let w = x - i as f64;
    let start = (1.0 - w) * at(i) + w * at(i + 1);
    let mut sum = 0.5 * (1.0 - w) * h * (start + at(i + 1));
    for k in (i + 1)..n {
        sum += 0.5 * h * (at(k) + at(k + 1));
    }
    sum + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_recovers_power_tails() {
        let h = 0.01;
        let phi: Vec<f64> = (1..=1000).map(|k| (k as f64 * h).powi(-2)).collect();
        // ∫_1^∞ r^{-2} = 1.
        let got = radial_integral(h, &phi, 1.0, true);
        assert!((got - 1.0).abs() < 1e-4, "{got}");
        let got = radial_integral(h, &phi, 2.345, true);
        assert!((got - 1.0 / 2.345).abs() < 1e-4, "{got}");
    }

    #[test]
    fn closure_handles_mixed_tails() {
        let h = 1.0 / 64.0;
        let phi: Vec<f64> = (1..=64 * 64)
            .map(|k| {
                let r = k as f64 * h;
                144.0 * r.powi(-4) + r.powi(-2)
            })
            .collect();
        let got = radial_integral(h, &phi, 4.0, true);
        let exact = 144.0 / (3.0 * 64.0) + 0.25;
        assert!((got - exact).abs() / exact < 1e-4, "{got} vs {exact}");
        let phi: Vec<f64> = (1..=64 * 64).map(|k| (k as f64 * h).powf(-10.0 / 3.0)).collect();
        let got = radial_integral(h, &phi, 2.0, true);
        let exact = 3.0 / 7.0 * 2f64.powf(-7.0 / 3.0);
        assert!((got - exact).abs() / exact < 1e-4, "{got} vs {exact}");
    }

    #[test]
    fn no_closure_for_nondecaying_data() {
        assert_eq!(power_tail(0.1, &[1.0, 1.0]), 0.0);
        assert_eq!(power_tail(0.1, &[-1.0, 1.0]), 0.0);
    }
}
