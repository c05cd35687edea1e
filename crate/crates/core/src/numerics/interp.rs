use num_complex::Complex64;

use super::grid::Grid1D;

/// Four-point (cubic) Lagrange interpolation of grid samples at `x`.
///
/// Returns `None` outside `[x_min, x_max]`.
pub fn cubic_interpolate(grid: &Grid1D, values: &[Complex64], x: f64) -> Option<Complex64> {
    let n = grid.len();
    if !grid.contains(x) || n < 4 {
        return None;
    }
    let h = grid.spacing();
    let t = (x - grid.x_min()) / h;
    let i = (t.floor() as usize).min(n - 2);
    let frac = t - i as f64;
    if frac.abs() < 1e-12 {
        return Some(values[i]);
    }
    let start = i.saturating_sub(1).min(n - 4);
    let s = t - start as f64;
    let mut out = Complex64::new(0.0, 0.0);
    for j in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != j {
                w *= (s - m as f64) / (j as f64 - m as f64);
            }
        }
        out += values[start + j] * w;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let g = Grid1D::new(-1.0, 1.0, 21).unwrap();
        let f = |x: f64| Complex64::new(x.powi(3) - x, 2.0 * x * x);
        let vals: Vec<_> = g.points().map(f).collect();
        for x in [-0.97, -0.333, 0.0, 0.41, 0.999] {
            let z = cubic_interpolate(&g, &vals, x).unwrap();
            assert!((z - f(x)).norm() < 1e-13);
        }
        assert!(cubic_interpolate(&g, &vals, 1.2).is_none());
    }
}
