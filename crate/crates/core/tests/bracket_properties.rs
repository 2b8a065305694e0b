use nambu_core::brackets::{lie_nambu, lie_poisson, nambu_rhs};
use nambu_core::functionals::{
    casimir, linear_observable, quadratic_observable, renyi_a, Functional,
};
use nambu_core::matrix::{random_density, random_hermitian};
use proptest::prelude::*;

fn probes(d: usize, seed: u64) -> Vec<Box<dyn Functional>> {
    vec![
        Box::new(linear_observable(random_hermitian(d, seed))),
        Box::new(quadratic_observable(random_hermitian(d, seed + 1))),
        Box::new(renyi_a(2.5).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn nambu_bracket_is_totally_antisymmetric(d in 2usize..=4, seed in 0u64..1_000_000) {
        let rho = random_density(d, d, seed).unwrap();
        let p = probes(d, seed);
        let (f, g, h) = (p[0].as_ref(), p[1].as_ref(), p[2].as_ref());
        let base = lie_nambu(f, g, h, &rho).unwrap();
        let tol = 1e-11 * base.abs().max(1.0);
        prop_assert!((lie_nambu(g, f, h, &rho).unwrap() + base).abs() <= tol);
        prop_assert!((lie_nambu(f, h, g, &rho).unwrap() + base).abs() <= tol);
        prop_assert!((lie_nambu(h, f, g, &rho).unwrap() - base).abs() <= tol);
    }

    #[test]
    fn poisson_bracket_is_antisymmetric(d in 2usize..=4, seed in 0u64..1_000_000) {
        let rho = random_density(d, d, seed).unwrap();
        let p = probes(d, seed);
        let fg = lie_poisson(p[0].as_ref(), p[1].as_ref(), &rho).unwrap();
        let gf = lie_poisson(p[1].as_ref(), p[0].as_ref(), &rho).unwrap();
        prop_assert!((fg + gf).abs() <= 1e-12 * fg.abs().max(1.0));
    }

    #[test]
    fn casimirs_have_zero_brackets(d in 2usize..=4, seed in 0u64..1_000_000, n in 1u32..=4) {
        let rho = random_density(d, d, seed).unwrap();
        let c = casimir(n).unwrap();
        let p = probes(d, seed);
        prop_assert!(lie_poisson(&c, p[0].as_ref(), &rho).unwrap().abs() <= 1e-12);
        prop_assert!(lie_nambu(&c, p[0].as_ref(), p[2].as_ref(), &rho).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn flow_generates_observable_rates(d in 2usize..=4, seed in 0u64..1_000_000) {
        // dF/dt = Tr(∇F ρ̇) = [F, H, S].
        let rho = random_density(d, d, seed).unwrap();
        let f = quadratic_observable(random_hermitian(d, seed + 7));
        let h = linear_observable(random_hermitian(d, seed + 8));
        let s = renyi_a(3.0).unwrap();
        let rate = f.gradient(&rho).unwrap().expectation(nambu_rhs(&h, &s, &rho).unwrap().as_matrix());
        let bracket = lie_nambu(&f, &h, &s, &rho).unwrap();
        prop_assert!((rate - bracket).abs() <= 1e-11 * bracket.abs().max(1.0));
    }
}
