use std::f64::consts::PI;

use super::Wavefunction;
use crate::error::{Error, Result};
use crate::numerics::{
    derivative, derivative_with, segments_where, Field, Stencil, WindowedField, RESIDUAL_MARGIN,
};
use crate::units::Units;

/// Default lower bound on `|ψ|²` for a sample to belong to an analysis window.
pub const DEFAULT_DENSITY_FLOOR: f64 = 1e-8;

/// Samples dropped on each side of a node.
pub const NODE_EXCLUSION: usize = 3;

const MIN_SEGMENT: usize = 8;

/// Polar form `ψ = R e^{is/ħ}` on one node-free segment.
#[derive(Debug, Clone)]
pub struct MadelungFields {
    pub r: Field,
    /// Action phase, anchored to zero at the segment's leftmost sample.
    pub s: Field,
    /// `∂s/∂x`.
    pub p_field: Field,
    /// `ħ arg ψ` at the anchor, so `s + global_phase` is the absolute phase.
    pub global_phase: f64,
    /// Index of the segment's first sample in the wavefunction grid.
    pub offset: usize,
    pub time: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl MadelungFields {
    pub fn density(&self) -> Field {
        self.r.map(|r| r * r)
    }

    fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.r.len()
    }
}

/// Node-free segments of a decomposed wavefunction, left to right.
#[derive(Debug, Clone)]
pub struct MadelungDecomposition {
    pub segments: Vec<MadelungFields>,
}

impl MadelungDecomposition {
    /// The single segment, if the window contained no node.
    pub fn single(&self) -> Option<&MadelungFields> {
        match self.segments.as_slice() {
            [one] => Some(one),
            _ => None,
        }
    }
}

/// Splits `ψ` into amplitude and unwrapped phase on every maximal run where
/// `|ψ|² > density_floor` and no node falls between neighbouring samples,
/// excluding [`NODE_EXCLUSION`] samples around each node.
pub fn madelung_decompose(psi: &Wavefunction, density_floor: f64) -> Result<MadelungDecomposition> {
    let vals = psi.values();
    // a node between two samples shows up as a phase step of at least π/2
    let mut keep: Vec<bool> = vals.iter().map(|z| z.norm_sqr() > density_floor).collect();
    for i in 0..vals.len().saturating_sub(1) {
        if (vals[i].conj() * vals[i + 1]).re <= 0.0 {
            keep[i] = false;
            keep[i + 1] = false;
        }
    }
    let runs = segments_where(vals.len(), |i| keep[i], NODE_EXCLUSION, MIN_SEGMENT);
    if runs.is_empty() {
        return Err(Error::Domain(
            "no sample of the wavefunction exceeds the density floor".into(),
        ));
    }
    let segments = runs
        .into_iter()
        .map(|range| {
            let grid = psi.grid().sub_grid(range.clone())?;
            let slice = &vals[range.clone()];
            let r: Vec<f64> = slice.iter().map(|z| z.norm()).collect();
            let mut phase = Vec::with_capacity(slice.len());
            let anchor = slice[0].arg();
            let mut acc = 0.0;
            let mut prev = anchor;
            phase.push(0.0);
            for z in &slice[1..] {
                let a = z.arg();
                acc += wrap_angle(a - prev);
                prev = a;
                phase.push(psi.hbar * acc);
            }
            let s = Field::new(grid, phase)?;
            let p_field = derivative(&s, 1)?;
            Ok(MadelungFields {
                r: Field::new(grid, r)?,
                s,
                p_field,
                global_phase: psi.hbar * anchor,
                offset: range.start,
                time: psi.time,
                hbar: psi.hbar,
                mass: psi.mass,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MadelungDecomposition { segments })
}

fn wrap_angle(a: f64) -> f64 {
    let mut w = a % (2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    } else if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

fn check_amplitude(r: &Field) -> Result<()> {
    for (x, &v) in r.grid().points().zip(r.values()) {
        if !(v > 1e-150) {
            return Err(Error::NodeInWindow { x });
        }
    }
    Ok(())
}

/// `Q = -(ħ²/2m) R''/R` with the default stencil.
pub fn quantum_potential(r: &Field, units: &Units) -> Result<Field> {
    quantum_potential_with(r, units, Stencil::Fourth)
}

/// [`quantum_potential`] with an explicit stencil, e.g. the three-point
/// Laplacian of the discretised Hamiltonian.
pub fn quantum_potential_with(r: &Field, units: &Units, stencil: Stencil) -> Result<Field> {
    check_amplitude(r)?;
    let curvature = derivative_with(r, 2, stencil)?;
    quantum_potential_from_curvature(r, &curvature, units)
}

/// `Q` from a supplied `R''`.
pub fn quantum_potential_from_curvature(r: &Field, curvature: &Field, units: &Units) -> Result<Field> {
    check_amplitude(r)?;
    let coeff = -units.hbar * units.hbar / (2.0 * units.mass);
    r.zip_map(curvature, |a, c| coeff * c / a)
}

/// `∂s/∂t + (∂s/∂x)²/2m + V - (ħ²/2mR) ∂²R/∂x²` at the middle snapshot.
///
/// The three snapshots must cover the same segment and be equally spaced in
/// time; the time derivative uses wrapped absolute phase differences.
pub fn qhj_residual(fields: [&MadelungFields; 3], potential: &Field) -> Result<WindowedField> {
    let [before, mid, after] = fields;
    let range = mid.range();
    if before.range() != range || after.range() != range {
        return Err(Error::invalid("fields", "snapshots cover different segments"));
    }
    if potential.len() < range.end {
        return Err(Error::invalid("potential", "potential grid is shorter than the segment"));
    }
    let dt = time_step(before.time, mid.time, after.time)?;
    let v = &potential.values()[range];
    let units = Units {
        hbar: mid.hbar,
        mass: mid.mass,
        ..Units::default()
    };
    let q = quantum_potential(&mid.r, &units)?;
    let values: Vec<f64> = (0..mid.r.len())
        .map(|i| {
            let ds = (after.s.values()[i] + after.global_phase)
                - (before.s.values()[i] + before.global_phase);
            let ds = wrap_angle(ds / mid.hbar) * mid.hbar;
            let sx = mid.p_field.values()[i];
            ds / (2.0 * dt) + sx * sx / (2.0 * mid.mass) + v[i] + q.values()[i]
        })
        .collect();
    Ok(WindowedField::from_interior(*mid.r.grid(), &values, RESIDUAL_MARGIN))
}

pub(crate) fn time_step(t0: f64, t1: f64, t2: f64) -> Result<f64> {
    let a = t1 - t0;
    let b = t2 - t1;
    if !(a > 0.0) || (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
        return Err(Error::invalid(
            "snapshots",
            format!("snapshot times {t0}, {t1}, {t2} are not equally spaced and increasing"),
        ));
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid1D;
    use crate::schrodinger_madelung::ho_eigenstate;
    use num_complex::Complex64;

    fn grid() -> Grid1D {
        Grid1D::symmetric(10.0, 2001).unwrap()
    }

    #[test]
    fn real_positive_has_no_phase() {
        let s = ho_eigenstate(0, grid(), &Units::natural()).unwrap();
        let d = madelung_decompose(&s.psi, DEFAULT_DENSITY_FLOOR).unwrap();
        let f = d.single().unwrap();
        assert_eq!(f.s.max_abs(), 0.0);
        assert_eq!(f.p_field.max_abs(), 0.0);
        assert_eq!(f.global_phase, 0.0);
    }

    #[test]
    fn plane_wave_momentum() {
        let k0 = 2.7;
        let g = grid();
        let r0 = 1.0 / 20f64.sqrt();
        let vals: Vec<_> = g.points().map(|x| Complex64::from_polar(r0, k0 * x)).collect();
        let units = Units {
            hbar: 0.8,
            ..Units::natural()
        };
        let psi = Wavefunction::unnormalized(g, vals, 0.0, &units).unwrap();
        let f = madelung_decompose(&psi, 1e-8).unwrap();
        let f = f.single().unwrap();
        for p in f.p_field.values() {
            assert!((p - 0.8 * k0).abs() < 1e-9);
        }
    }

    #[test]
    fn global_phase_is_not_momentum() {
        let s = ho_eigenstate(0, grid(), &Units::natural()).unwrap();
        let psi = s.psi.evolved_phase(s.energy, 3.3);
        let d = madelung_decompose(&psi, DEFAULT_DENSITY_FLOOR).unwrap();
        let f = d.single().unwrap();
        assert!(f.s.max_abs() < 1e-12);
        assert!(f.p_field.max_abs() < 1e-10);
        let expected = Complex64::from_polar(1.0, -0.5 * 3.3).arg();
        assert!((f.global_phase - expected).abs() < 1e-14);
    }

    #[test]
    fn nodes_split_segments() {
        let s = ho_eigenstate(3, grid(), &Units::natural()).unwrap();
        let d = madelung_decompose(&s.psi, DEFAULT_DENSITY_FLOOR).unwrap();
        assert_eq!(d.segments.len(), 4);
        for f in &d.segments {
            assert!(f.r.min() > 0.0);
        }
    }

    #[test]
    fn ground_state_quantum_potential() {
        let s = ho_eigenstate(0, grid(), &Units::natural()).unwrap();
        let q = quantum_potential(&s.amplitude(), &Units::natural()).unwrap();
        for (x, v) in grid().points().zip(q.values()).filter(|(x, _)| x.abs() < 5.0) {
            assert!((v - 0.5 * (1.0 - x * x)).abs() < 1e-6, "Q({x}) = {v}");
        }
        assert!((q.values()[1000] - 0.5).abs() < 1e-8);
    }

    #[test]
    fn constant_amplitude_has_no_quantum_potential() {
        let f = Field::from_fn(grid(), |_| 0.3);
        assert!(quantum_potential(&f, &Units::natural()).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn node_rejected() {
        let s = ho_eigenstate(1, grid(), &Units::natural()).unwrap();
        assert!(matches!(
            quantum_potential(&s.amplitude(), &Units::natural()),
            Err(Error::NodeInWindow { .. })
        ));
    }

    #[test]
    fn eigenstate_identity_analytic() {
        for n in 0..6 {
            let s = ho_eigenstate(n, grid(), &Units::natural()).unwrap();
            let d = madelung_decompose(&s.psi, DEFAULT_DENSITY_FLOOR).unwrap();
            for seg in &d.segments {
                let curv = s.modulus_curvature(seg.offset..seg.offset + seg.r.len()).unwrap();
                let q = quantum_potential_from_curvature(&seg.r, &curv, &Units::natural()).unwrap();
                for (x, qv) in seg.r.grid().points().zip(q.values()) {
                    let total = 0.5 * x * x + qv;
                    assert!((total - s.energy).abs() / s.energy < 1e-9, "n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn qhj_vanishes_for_eigenstates() {
        let g = grid();
        let v = Field::from_fn(g, |x| 0.5 * x * x);
        for n in [0, 2] {
            let s = ho_eigenstate(n, g, &Units::natural()).unwrap();
            let dt = 1e-3;
            let snaps: Vec<_> = [1.0 - dt, 1.0, 1.0 + dt]
                .iter()
                .map(|&t| madelung_decompose(&s.psi.evolved_phase(s.energy, t), DEFAULT_DENSITY_FLOOR).unwrap())
                .collect();
            for k in 0..snaps[1].segments.len() {
                let res = qhj_residual(
                    [&snaps[0].segments[k], &snaps[1].segments[k], &snaps[2].segments[k]],
                    &v,
                )
                .unwrap();
                // keep to the bulk of the segment where R is not tiny
                let bulk: Vec<f64> = res
                    .samples()
                    .filter(|(x, _)| x.abs() < 4.0)
                    .map(|(_, r)| r)
                    .collect();
                let worst = bulk.iter().fold(0.0f64, |m, r| m.max(r.abs()));
                assert!(worst < 1e-6, "n={n} segment {k}: {worst}");
            }
        }
    }

    #[test]
    fn free_gaussian_bracket() {
        // s = 0, V = 0: residual is just the quantum potential
        let g = grid();
        let sigma: f64 = 1.3;
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        let psi: Vec<f64> = g.points().map(|x| norm * (-x * x / (4.0 * sigma * sigma)).exp()).collect();
        let psi = Wavefunction::from_real(g, &psi, 0.0, &Units::natural()).unwrap();
        let snaps: Vec<_> = [-1e-3, 0.0, 1e-3]
            .iter()
            .map(|&t| madelung_decompose(&psi.clone().with_time(t), 1e-8).unwrap())
            .collect();
        let zero = Field::from_fn(g, |_| 0.0);
        let res = qhj_residual(
            [
                snaps[0].single().unwrap(),
                snaps[1].single().unwrap(),
                snaps[2].single().unwrap(),
            ],
            &zero,
        )
        .unwrap();
        let s2 = sigma * sigma;
        for (x, r) in res.samples() {
            // R''/R = x²/(4σ⁴) - 1/(2σ²)
            let want = -0.5 * (x * x / (4.0 * s2 * s2) - 1.0 / (2.0 * s2));
            assert!((r - want).abs() < 1e-7);
        }
    }
}
