use super::grid::Field;
use crate::error::{Error, Result};

/// Finite-difference stencil family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Stencil {
    /// Three-point centred differences, second-order one-sided ends.
    Second,
    /// Five-point centred differences, fourth-order one-sided ends.
    #[default]
    Fourth,
}

impl Stencil {
    fn min_points(self) -> usize {
        match self {
            Stencil::Second => 4,
            Stencil::Fourth => 6,
        }
    }
}

/// Derivative of `f` (order 1 or 2) with the default fourth-order stencil.
///
/// Grids with fewer than six points fall back to the second-order stencil.
pub fn derivative(f: &Field, order: u8) -> Result<Field> {
    let stencil = if f.len() >= Stencil::Fourth.min_points() {
        Stencil::Fourth
    } else {
        Stencil::Second
    };
    derivative_with(f, order, stencil)
}

pub fn derivative_with(f: &Field, order: u8, stencil: Stencil) -> Result<Field> {
    if f.len() < 5 {
        return Err(Error::invalid(
            "f",
            format!("derivative needs at least 5 samples, got {}", f.len()),
        ));
    }
    let values = derivative_values(f.values(), f.grid().spacing(), order, stencil)?;
    Field::new(*f.grid(), values)
}

/// Slice-level derivative on uniformly spaced samples.
pub fn derivative_values(f: &[f64], h: f64, order: u8, stencil: Stencil) -> Result<Vec<f64>> {
    if order != 1 && order != 2 {
        return Err(Error::invalid(
            "order",
            format!("only orders 1 and 2 are supported, got {order}"),
        ));
    }
    if f.len() < stencil.min_points() {
        return Err(Error::invalid(
            "f",
            format!("{:?} stencil needs {} samples", stencil, stencil.min_points()),
        ));
    }
    Ok(match (stencil, order) {
        (Stencil::Second, 1) => d1_second(f, h),
        (Stencil::Second, _) => d2_second(f, h),
        (Stencil::Fourth, 1) => d1_fourth(f, h),
        (Stencil::Fourth, _) => d2_fourth(f, h),
    })
}

fn d1_second(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    d
}

fn d2_second(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let h2 = h * h;
    let mut d = vec![0.0; n];
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    for i in 1..n - 1 {
        d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
    }
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    d
}

const D1_EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const D1_EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];
const D2_EDGE0: [f64; 6] = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
const D2_EDGE1: [f64; 6] = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];

fn dot(c: &[f64], f: impl Iterator<Item = f64>) -> f64 {
    c.iter().zip(f).map(|(a, b)| a * b).sum()
}

fn d1_fourth(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let s = 12.0 * h;
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / s;
    }
    d[0] = dot(&D1_EDGE0, f.iter().copied()) / s;
    d[1] = dot(&D1_EDGE1, f.iter().copied()) / s;
    // mirrored stencils flip sign for odd derivatives
    d[n - 1] = -dot(&D1_EDGE0, f.iter().rev().copied()) / s;
    d[n - 2] = -dot(&D1_EDGE1, f.iter().rev().copied()) / s;
    d
}

fn d2_fourth(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let s = 12.0 * h * h;
    let mut d = vec![0.0; n];
    for i in 2..n - 2 {
        d[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) / s;
    }
    d[0] = dot(&D2_EDGE0, f.iter().copied()) / s;
    d[1] = dot(&D2_EDGE1, f.iter().copied()) / s;
    d[n - 1] = dot(&D2_EDGE0, f.iter().rev().copied()) / s;
    d[n - 2] = dot(&D2_EDGE1, f.iter().rev().copied()) / s;
    d
}
