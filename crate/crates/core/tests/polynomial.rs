use basinforge::polynomial::parse_complex;
use basinforge::{Error, Polynomial, RootCatalog};
use num_complex::Complex64;
use proptest::prelude::*;

fn finite_difference(p: &Polynomial, z: Complex64, order: usize) -> Complex64 {
    let h = 1e-4;
    let d = |z: Complex64| p.eval_with_derivatives(z, order - 1).unwrap()[order - 1];
    (d(z + h) - d(z - h)) / (2.0 * h)
}

proptest! {
    #[test]
    fn derivatives_match_finite_differences(
        coeffs in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 2..10),
        re in -1.5f64..1.5,
        im in -1.5f64..1.5,
    ) {
        let coeffs: Vec<_> = coeffs.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
        prop_assume!(coeffs.last().unwrap().norm() > 0.1);
        let p = Polynomial::new(coeffs).unwrap();
        let z = Complex64::new(re, im);
        let d = p.eval_with_derivatives(z, 3).unwrap();
        prop_assert!((d[0] - p.eval(z)).norm() <= 1e-12 * d[0].norm().max(1.0));
        for (k, &dk) in d.iter().enumerate().skip(1) {
            let fd = finite_difference(&p, z, k);
            prop_assert!((dk - fd).norm() <= 1e-5 * dk.norm().max(1.0), "order {k}: {dk} vs {fd}");
        }
    }
}

#[test]
fn unity_roots_solve_their_polynomial() {
    for n in [1, 3, 9, 17] {
        let p = Polynomial::unity(n).unwrap();
        let roots = RootCatalog::unity_roots(n).unwrap();
        assert_eq!(roots.len(), n);
        roots.check_residuals(&p).unwrap();
        for (k, &r) in roots.roots().iter().enumerate() {
            let j = roots.conjugate_index(k).unwrap();
            assert!((roots.roots()[j] - r.conj()).norm() < 1e-15);
        }
    }
}

#[test]
fn derivative_order_is_capped() {
    let p = Polynomial::unity(3).unwrap();
    assert!(p.eval_with_derivatives(Complex64::new(1.0, 0.0), 4).is_err());
}

#[test]
fn degenerate_inputs() {
    let constant = Polynomial::new(vec![Complex64::new(2.0, 0.0)]).unwrap();
    assert_eq!(constant.degree(), 0);
    let d = constant.eval_with_derivatives(Complex64::new(5.0, 1.0), 3).unwrap();
    assert_eq!(
        d,
        vec![
            Complex64::new(2.0, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::default()
        ]
    );
    assert!(Polynomial::new(vec![Complex64::new(1.0, 0.0), Complex64::default()]).is_err());
    assert!(Polynomial::new(Vec::new()).is_err());
    assert!(Polynomial::unity(0).is_err());
    assert!(RootCatalog::unity_roots(0).is_err());
}

#[test]
fn nonic_at_two() {
    let p = Polynomial::unity(9).unwrap();
    assert_eq!(
        p.eval_with_derivatives(Complex64::new(2.0, 0.0), 0).unwrap(),
        vec![Complex64::new(511.0, 0.0)]
    );
}

#[test]
fn cube_roots_are_shared_with_ninth_roots() {
    let three = RootCatalog::unity_roots(3).unwrap();
    let nine = RootCatalog::unity_roots(9).unwrap();
    for (k, &r) in three.roots().iter().enumerate() {
        assert!((nine.roots()[3 * k] - r).norm() < 1e-12);
        assert!((r.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn parses_complex_tokens() {
    assert_eq!(parse_complex("-1+0i").unwrap(), Complex64::new(-1.0, 0.0));
    assert_eq!(parse_complex("0.5-2e-3i").unwrap(), Complex64::new(0.5, -2e-3));
    assert_eq!(parse_complex("1e-2+3E+1i").unwrap(), Complex64::new(1e-2, 30.0));
    assert!(parse_complex("1.5").is_err());
    assert!(parse_complex("x+yi").is_err());
    let p: Polynomial = "-1+0i,0+0i,0+0i,1+0i".parse().unwrap();
    assert_eq!(p, Polynomial::unity(3).unwrap());
}

#[test]
fn root_catalog_parsing_and_matching() {
    let cat = RootCatalog::parse(
        "# cube roots\n1+0i\n-0.5+0.8660254037844386i\n\n-0.5-0.8660254037844386i  # last\n",
        1e-15,
    )
    .unwrap();
    assert_eq!(cat.len(), 3);
    assert_eq!(cat.locate(Complex64::new(1.0 + 1e-16, 0.0), 1e-15), Some(0));
    assert_eq!(cat.locate(Complex64::new(0.9, 0.0), 1e-15), None);
    let err = RootCatalog::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 1e-15);
    assert!(matches!(err, Err(Error::InvalidRoots(_))), "{err:?}");
    assert!(RootCatalog::unity_roots(9)
        .unwrap()
        .check_residuals(&Polynomial::unity(3).unwrap())
        .is_err());
}
