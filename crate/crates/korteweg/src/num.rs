//! Small numeric helpers shared across modules.

/// Real power with an exact fast path for small integer exponents.
///
/// Exponents that are exactly representable integers with |e| ≤ 32 are
/// evaluated by repeated multiplication (`powi`), everything else through the
/// exp/log route (`powf`). The integer path keeps values like 2⁻² bit-exact,
/// which the coefficient-law tests rely on.
#[inline]
pub fn powr(base: f64, exp: f64) -> f64 {
    if exp == 0.0 {
        return 1.0;
    }
    if exp.fract() == 0.0 && exp.abs() <= 32.0 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}

/// Composite trapezoid rule over uniformly spaced samples.
#[inline]
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dx * (0.5 * values[0] + interior + 0.5 * values[values.len() - 1])
}

/// Adaptive trapezoid quadrature of `f` over [a, b] with Richardson
/// extrapolation, refined until the extrapolated correction falls below
/// `tol` (absolute). Second order per level; the returned value carries the
/// extrapolation and is effectively Simpson-accurate.
pub fn quad_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut n: usize = 16;
    let mut h = (b - a) / n as f64;
    let mut t = {
        let mut s = 0.5 * (f(a) + f(b));
        for i in 1..n {
            s += f(a + i as f64 * h);
        }
        s * h
    };
    // Each halving only evaluates the new midpoints.
    for _ in 0..22 {
        h *= 0.5;
        let mut mid = 0.0;
        for i in 0..n {
            mid += f(a + (2 * i + 1) as f64 * h);
        }
        let t_next = 0.5 * t + h * mid;
        n *= 2;
        let corr = (t_next - t) / 3.0;
        t = t_next;
        if corr.abs() <= tol {
            return t + corr;
        }
    }
    t
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        num += (xi - mx) * (yi - my);
        den += (xi - mx) * (xi - mx);
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powr_integer_exponents_are_exact() {
        assert_eq!(powr(2.0, -2.0), 0.25);
        assert_eq!(powr(0.5, -3.0), 8.0);
        assert_eq!(powr(3.0, 0.0), 1.0);
    }

    #[test]
    fn powr_matches_powf_for_fractional_exponents() {
        let v: f64 = 1.7;
        assert!((powr(v, -2.5) - v.powf(-2.5)).abs() < 1e-16);
    }

    #[test]
    fn quad_recovers_polynomial_integral() {
        // ∫₁² z² dz = 7/3
        let got = quad_adaptive(|z| z * z, 1.0, 2.0, 1e-13);
        assert!((got - 7.0 / 3.0).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn trapezoid_exact_on_linear_data() {
        // f(x) = 1 + 3x sampled on [0, 1]: integral 2.5
        let xs: Vec<f64> = (0..11).map(|i| 1.0 + 0.3 * i as f64).collect();
        assert!((trapezoid(&xs, 0.1) - 2.5).abs() < 1e-14);
    }
}
