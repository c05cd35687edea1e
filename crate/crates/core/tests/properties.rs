use std::f64::consts::PI;

use madelung_lab::boltzmann::{
    boltzmann_zq, boltzmann_zq_closed_form, energy_relation, ho_special_case, CanonicalEnsemble,
};
use madelung_lab::cli::fmt6;
use madelung_lab::equilibrium::{
    entropy_field, fluctuation_model, gibbs_entropy, mean_square_displacement, momentum_dispersion_entropy,
};
use madelung_lab::numerics::{Field, Grid1D};
use madelung_lab::phase_space::PhaseSpaceDistribution;
use madelung_lab::schrodinger_madelung::{ho_eigenstate, metastable_state};
use madelung_lab::wigner_moyal::characteristic_function;
use madelung_lab::Units;
use proptest::prelude::*;

fn gauss(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gaussian_gibbs_entropy(sigma in 0.3f64..2.0, mean in -1.0f64..1.0) {
        let g = Grid1D::symmetric(16.0, 4001).unwrap();
        let rho = Field::from_fn(g, |x| gauss(x, mean, sigma * sigma));
        let exact = -0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln();
        prop_assert!((gibbs_entropy(&rho).unwrap() - exact).abs() < 1e-8);
    }

    #[test]
    fn gaussian_uncertainty_product(var in 0.05f64..3.0, hbar in 0.1f64..2.0) {
        let g = Grid1D::symmetric(4.0, 201).unwrap();
        let rho = Field::from_fn(g, |x| gauss(x, 0.0, var));
        let disp = momentum_dispersion_entropy(&rho, hbar).unwrap();
        let msd = mean_square_displacement(&fluctuation_model(&entropy_field(&rho, 1.0).unwrap()).unwrap()).unwrap();
        for (d, m) in disp.values().iter().zip(msd.values()) {
            prop_assert!((d * m - 0.25 * hbar * hbar).abs() < 1e-10 * hbar * hbar);
        }
    }

    #[test]
    fn decaying_norm(tau in 0.1f64..10.0, frac in 0.0f64..5.0, n in 0usize..6) {
        let s = ho_eigenstate(n, Grid1D::symmetric(10.0, 1001).unwrap(), &Units::natural()).unwrap();
        let t = frac * tau;
        let phi = metastable_state(&s.psi, tau, t).unwrap();
        prop_assert!((phi.norm() - (-2.0 * t / tau).exp()).abs() < 1e-10);
    }

    #[test]
    fn canonical_quadrature_matches_closed_form(
        kbt in 0.05f64..3.0, omega in 0.3f64..3.0, q in -1.0f64..1.0, d in -0.1f64..0.1,
    ) {
        let e = CanonicalEnsemble::harmonic(kbt, &Units::natural(), vec![1.0], &[omega]).unwrap();
        let a = boltzmann_zq(&e, &[q], &[d]).unwrap();
        let b = boltzmann_zq_closed_form(&e, &[q], &[d]).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b);
    }

    #[test]
    fn locked_energy_is_half_quantum_per_dof(omega in 0.2f64..4.0, n in 1usize..5, mass in 0.3f64..3.0) {
        let units = Units::natural();
        let lock = ho_special_case(mass, omega, &units, n).unwrap();
        prop_assert!((lock.uncertainty_product - 0.25).abs() < 1e-14);
        let e = CanonicalEnsemble::harmonic(lock.temperature_lock, &units, vec![mass; n], &vec![omega; n]).unwrap();
        let r = energy_relation(&e, &vec![0.0; n]).unwrap();
        prop_assert!((r.e_full - n as f64 * omega / 2.0).abs() < 1e-8 * (1.0 + omega * n as f64));
        prop_assert!((r.e_equilibrium - n as f64 * omega / 2.0).abs() < 1e-12 * (1.0 + omega * n as f64));
    }

    #[test]
    fn characteristic_function_is_hermitian(mx in -1.0f64..1.0, mp in -1.5f64..1.5, vp in 0.2f64..2.0) {
        let xg = Grid1D::symmetric(6.0, 61).unwrap();
        let pg = Grid1D::symmetric(10.0, 401).unwrap();
        let f = PhaseSpaceDistribution::from_fn_normalized(xg, pg, 0.0, 1.0, Field::from_fn(xg, |_| 0.0), |x, p| {
            gauss(x, mx, 1.0) * gauss(p, mp, vp)
        }).unwrap();
        let z = characteristic_function(&f, Grid1D::centered(0.02, 3).unwrap(), 1.0).unwrap();
        prop_assert!(z.hermiticity_defect() < 1e-10);
        let rho = z.density();
        for (i, r) in rho.values().iter().enumerate() {
            prop_assert!((r - f.momentum_moment(0)[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn six_digit_format_round_trips(v in prop_oneof![-1e8f64..1e8, -1e-3f64..1e-3]) {
        prop_assume!(v != 0.0);
        let back: f64 = fmt6(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-6 * v.abs());
    }
}
