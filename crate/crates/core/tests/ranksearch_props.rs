mod common;

use common::*;
use proptest::prelude::*;
use symrank::ranksearch::{cp_als, flattening_bound_all, hyperdet_222, AlsConfig, Class222};
use symrank::slocc::{strassen_certificate, symmetric_to_product, ProductDecomposition};
use symrank::tensors::{apply_local, Matrix, Scalar};
use symrank::wpower::{ghz_state, w_power_state, w_state, w3_cubed_certificate, wn_constructive_decomposition};

fn invertible2() -> impl Strategy<Value = Matrix> {
    matrix(2, 2).prop_filter("invertible", |m| !m.determinant().unwrap().is_zero())
}

fn ops3() -> impl Strategy<Value = symrank::tensors::LocalOperatorSet> {
    prop::collection::vec(invertible2(), 3).prop_map(|v| symrank::tensors::LocalOperatorSet::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn flattenings_never_exceed_certificate_length(
        (dims, terms) in dims(2..=3, 3).prop_flat_map(|d| {
            let term = (nonzero_rational(), d.iter().map(|&x| vector(x)).collect::<Vec<_>>());
            (Just(d), prop::collection::vec(term, 1..=4))
        })
    ) {
        let mut p = ProductDecomposition::new(dims);
        for (w, vs) in terms {
            p.push(w, vs).unwrap();
        }
        let s = p.to_state().unwrap();
        prop_assume!(!s.is_zero());
        prop_assert!(flattening_bound_all(&s).unwrap() <= p.len());
    }

    #[test]
    fn slocc_images_keep_their_class(ops in ops3()) {
        let w = apply_local(&ops, &w_state(3).unwrap()).unwrap();
        prop_assert_eq!(hyperdet_222(&w).unwrap().class, Class222::W);
        let g = apply_local(&ops, &ghz_state(3, 2).unwrap()).unwrap();
        prop_assert_eq!(hyperdet_222(&g).unwrap().class, Class222::Ghz);
    }
}

#[test]
fn library_certificates_respect_flattening_bounds() {
    let w32 = symmetric_to_product(&wn_constructive_decomposition(3, 2).unwrap()).unwrap();
    assert!(flattening_bound_all(&w_power_state(3, 2).unwrap()).unwrap() <= w32.len());
    let w33 = symmetric_to_product(&w3_cubed_certificate().unwrap()).unwrap();
    assert!(flattening_bound_all(&w_power_state(3, 3).unwrap()).unwrap() <= w33.len());
    let s = strassen_certificate().unwrap();
    assert_eq!(flattening_bound_all(&s.to_state().unwrap()).unwrap(), 4);
    for n in 3..=6 {
        let c = symmetric_to_product(&wn_constructive_decomposition(n, 2).unwrap()).unwrap();
        assert!(flattening_bound_all(&w_power_state(n, 2).unwrap()).unwrap() <= c.len());
    }
}

#[test]
fn identical_configs_give_identical_outcomes() {
    let s = apply_local(
        &symrank::tensors::LocalOperatorSet::new(vec![
            Matrix::from_rows(vec![vec![Scalar::int(1), Scalar::int(2)], vec![Scalar::int(0), Scalar::int(1)]]).unwrap(),
            Matrix::identity(2),
            Matrix::identity(2),
        ])
        .unwrap(),
        &ghz_state(3, 2).unwrap(),
    )
    .unwrap();
    let mut cfg = AlsConfig::new(2);
    cfg.restarts = 3;
    let a = cp_als(&s, &cfg).unwrap();
    assert_eq!(a, cp_als(&s, &cfg).unwrap());
    assert!(a.succeeded());
    cfg.seed = 2;
    assert!(cp_als(&s, &cfg).unwrap().succeeded());
}
