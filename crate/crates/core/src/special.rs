//! Real error functions used by the closed-form results.

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `1 + erf(x)`, computed as `erfc(-x)` to avoid cancellation for x ≪ 0.
pub fn one_plus_erf(x: f64) -> f64 {
    libm::erfc(-x)
}

/// Scaled complementary error function `e^{x²} erfc(x)` for `x >= 5`,
/// from the Laplace continued fraction.
fn erfcx_large(x: f64) -> f64 {
    // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut tail = x;
    for k in (1..=60).rev() {
        tail = x + (k as f64 * 0.5) / tail;
    }
    1.0 / (std::f64::consts::PI.sqrt() * tail)
}

/// `e^a · erfc(x)` without intermediate overflow or `∞·0`.
pub fn exp_erfc(a: f64, x: f64) -> f64 {
    if x < 5.0 {
        a.exp() * libm::erfc(x)
    } else {
        (a - x * x).exp() * erfcx_large(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_values() {
        // Abramowitz & Stegun table values.
        let cases = [
            (0.5, 0.520_499_877_813_046_5),
            (1.0, 0.842_700_792_949_714_9),
            (2.0, 0.995_322_265_018_952_7),
        ];
        for (x, v) in cases {
            assert!(((erf(x) - v) / v).abs() < 1e-14);
            assert!(((erf(-x) + v) / v).abs() < 1e-14);
        }
        assert!((erfc(3.0) - 2.209_049_699_858_544e-5).abs() / 2.2e-5 < 1e-12);
        assert_eq!(erf(0.0), 0.0);
    }

    #[test]
    fn one_plus_erf_deep_tail() {
        let v = one_plus_erf(-6.0);
        assert!((v - erfc(6.0)).abs() <= 1e-300 + 1e-15 * v);
        assert!(v > 0.0 && v < 1e-16);
    }

    #[test]
    fn scaled_erfc_continuity() {
        for x in [5.0f64, 5.5, 7.0, 12.0, 20.0] {
            let direct = (x * x).exp() * erfc(x);
            let cf = erfcx_large(x);
            assert!((direct - cf).abs() / direct < 1e-13, "x = {x}");
        }
        assert!((exp_erfc(0.0, 4.999_999) - exp_erfc(0.0, 5.0)).abs() < 1e-15);
    }

    #[test]
    fn exp_erfc_no_overflow() {
        let v = exp_erfc(1500.0, 40.0);
        assert!(v.is_finite() && v > 0.0);
        let expect = (1500.0f64 - 1600.0).exp() * erfcx_large(40.0);
        assert!((v - expect).abs() / expect < 1e-12);
    }
}
