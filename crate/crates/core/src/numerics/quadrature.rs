use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::grid::Field;

/// Values that composite quadrature can sum.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Default relative cut-off used to truncate integrals over the real line.
pub const DEFAULT_TRUNCATION: f64 = 1e-16;

/// Composite Simpson integral of `field` over its grid.
///
/// Odd sample counts use Simpson throughout; even counts use Simpson on the
/// first `n - 1` samples and the trapezoid rule on the final panel.
pub fn integrate<T: Integrand>(field: &Field<T>) -> T {
    simpson(field.values(), field.grid().spacing())
}

/// Composite Simpson rule on uniformly spaced samples.
pub fn simpson<T: Integrand>(values: &[T], h: f64) -> T {
    let n = values.len();
    match n {
        0 | 1 => T::zero(),
        2 => (values[0] + values[1]) * (0.5 * h),
        _ => {
            let m = if n % 2 == 1 { n } else { n - 1 };
            let mut odd = T::zero();
            let mut even = T::zero();
            for (i, &v) in values[1..m - 1].iter().enumerate() {
                if i % 2 == 0 {
                    odd = odd + v;
                } else {
                    even = even + v;
                }
            }
            let mut total = (values[0] + values[m - 1] + odd * 4.0 + even * 2.0) * (h / 3.0);
            if m < n {
                total = total + (values[n - 2] + values[n - 1]) * (0.5 * h);
            }
            total
        }
    }
}

/// Simpson weights matching [`simpson`], so `sum(w_i f_i) == simpson(f, h)`.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 => {}
        1 => {}
        2 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
        }
        _ => {
            let m = if n % 2 == 1 { n } else { n - 1 };
            for (i, wi) in w.iter_mut().enumerate().take(m) {
                *wi = if i == 0 || i == m - 1 {
                    h / 3.0
                } else if i % 2 == 1 {
                    4.0 * h / 3.0
                } else {
                    2.0 * h / 3.0
                };
            }
            if m < n {
                w[n - 2] += 0.5 * h;
                w[n - 1] += 0.5 * h;
            }
        }
    }
    w
}

/// Half-width beyond which a centred Gaussian of the given variance falls
/// below `rel_tol` of its peak.
pub fn gaussian_truncation_radius(variance: f64, rel_tol: f64) -> f64 {
    (2.0 * variance * (1.0 / rel_tol).ln()).sqrt()
}

/// Extrapolates `D(h) = D0 + a h^2 + b h^4 + ...` to `h -> 0` from samples at
/// `h, 2h, 3h` (or fewer shells).
pub fn richardson_even(shells: &[f64]) -> f64 {
    match shells.len() {
        0 => f64::NAN,
        1 => shells[0],
        2 => (4.0 * shells[0] - shells[1]) / 3.0,
        _ => 1.5 * shells[0] - 0.6 * shells[1] + 0.1 * shells[2],
    }
}

/// Complex counterpart of [`richardson_even`].
pub fn richardson_even_complex(shells: &[Complex64]) -> Complex64 {
    match shells.len() {
        0 => Complex64::new(f64::NAN, f64::NAN),
        1 => shells[0],
        2 => (shells[0] * 4.0 - shells[1]) / 3.0,
        _ => shells[0] * 1.5 - shells[1] * 0.6 + shells[2] * 0.1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid1D;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_is_exact() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let f = Field::from_fn(g, |_| 1.0);
        assert_abs_diff_eq!(integrate(&f), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn quadratic_is_exact() {
        let g = Grid1D::new(0.0, 1.0, 101).unwrap();
        let f = Field::from_fn(g, |x| x * x);
        assert_abs_diff_eq!(integrate(&f), 1.0 / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn gaussian_matches_sqrt_pi() {
        let g = Grid1D::new(-8.0, 8.0, 1601).unwrap();
        let f = Field::from_fn(g, |x| (-x * x).exp());
        assert_abs_diff_eq!(integrate(&f), std::f64::consts::PI.sqrt(), epsilon = 1e-10);
    }

    #[test]
    fn even_count_uses_trapezoid_tail() {
        let g = Grid1D::new(0.0, 1.0, 100).unwrap();
        let f = Field::from_fn(g, |x| x);
        assert_abs_diff_eq!(integrate(&f), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let g = Grid1D::new(0.0, 1.0, n).unwrap();
            let f = Field::from_fn(g, f64::exp);
            (integrate(&f) - (std::f64::consts::E - 1.0)).abs()
        };
        let ratio = err(21) / err(41);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn weights_reproduce_rule() {
        for n in [3, 4, 7, 10] {
            let g = Grid1D::new(-1.0, 2.0, n).unwrap();
            let f = Field::from_fn(g, |x| (x * 1.3).sin() + x * x);
            let w = simpson_weights(n, g.spacing());
            let s: f64 = w.iter().zip(f.values()).map(|(a, b)| a * b).sum();
            assert_abs_diff_eq!(s, integrate(&f), epsilon = 1e-14);
        }
    }

    #[test]
    fn complex_integrand() {
        let g = Grid1D::new(0.0, std::f64::consts::PI, 401).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x.sin(), x.cos()));
        let z = integrate(&f);
        assert_abs_diff_eq!(z.re, 2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn richardson_removes_h2_and_h4() {
        let d = |h: f64| 3.0 + 0.7 * h * h - 2.0 * h.powi(4);
        let h = 0.1;
        let r = richardson_even(&[d(h), d(2.0 * h), d(3.0 * h)]);
        assert_abs_diff_eq!(r, 3.0, epsilon = 1e-13);
    }
}
