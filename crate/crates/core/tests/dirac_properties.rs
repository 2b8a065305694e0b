use nambu_core::dirac::{
    dirac_hamiltonian, dispersion_residual, evolve_modes_in_frame, FourVector, SpinorMode,
};
use nambu_core::C64;
use proptest::prelude::*;

fn wave_vector() -> impl Strategy<Value = [f64; 3]> {
    [-3.0f64..3.0, -3.0f64..3.0, -3.0f64..3.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dispersion_holds_in_any_slicing(k in wave_vector(), m in 0.0f64..3.0, rapidity in -1.0f64..1.0) {
        prop_assert!(dispersion_residual(k, m, &FourVector::boost_z(rapidity)).unwrap() <= 1e-10);
    }

    #[test]
    fn mode_matrix_is_self_adjoint_for_the_norm(k in wave_vector(), m in 0.0f64..3.0, rapidity in -1.0f64..1.0) {
        let dh = dirac_hamiltonian(k, m, &FourVector::boost_z(rapidity)).unwrap();
        prop_assert!(dh.self_adjointness_defect() <= 1e-13 * (1.0 + m + k.iter().map(|x| x.abs()).sum::<f64>()).powi(2));
    }

    #[test]
    fn evolution_conserves_the_norm(
        k in wave_vector(), m in 0.0f64..3.0, t in -50.0f64..50.0,
        re in prop::array::uniform4(-1.0f64..1.0), im in prop::array::uniform4(-1.0f64..1.0),
    ) {
        let v: Vec<C64> = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
        prop_assume!(v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
        let n = FourVector::boost_z(0.3);
        let mode = SpinorMode::from_vector(k, &v);
        let dh = dirac_hamiltonian(k, m, &n).unwrap();
        let out = evolve_modes_in_frame(&[(mode, C64::new(1.0, 0.0))], m, t, &n).unwrap()[0];
        let (a, b) = (dh.norm(&v), dh.norm(&out.to_vector()));
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }
}
