mod common;

use std::collections::BTreeMap;

use common::*;
use proptest::prelude::*;
use symrank::slocc::{
    direct_sum_witness, ghz_to_state_operators, lemma_elimination, ConversionWitness, ProductDecomposition,
    SlotPattern,
};
use symrank::tensors::{direct_sum, LocalOperatorSet, Scalar};

fn certificate() -> impl Strategy<Value = ProductDecomposition> {
    (dims(2..=3, 3), 1usize..=3).prop_flat_map(|(dims, r)| {
        let term = (nonzero_rational(), dims.iter().map(|&d| vector(d)).collect::<Vec<_>>());
        prop::collection::vec(term, r).prop_map(move |terms| {
            let mut p = ProductDecomposition::new(dims.clone());
            for (w, vs) in terms {
                p.push(w, vs).unwrap();
            }
            p
        })
    })
}

fn patterns(n: usize) -> Vec<SlotPattern> {
    (0..(1usize << n) - 1)
        .map(|bits| SlotPattern::new((0..n).filter(|s| bits >> s & 1 == 1)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn every_verified_certificate_yields_a_witness(cert in certificate()) {
        let target = cert.to_state().unwrap();
        prop_assume!(!target.is_zero());
        let w = ghz_to_state_operators(&cert, &target).unwrap();
        prop_assert_eq!(w.source.local_dims()[0], cert.len());
        prop_assert_eq!(w.verify(0.0).unwrap(), 0.0);
        // the witness survives serialization
        let back: ConversionWitness = serde_json::from_str(&serde_json::to_string(&w).unwrap()).unwrap();
        prop_assert_eq!(back.verify(0.0).unwrap(), 0.0);
    }

    #[test]
    fn direct_sums_of_witnesses_verify(
        (c1, c2) in (certificate(), certificate()).prop_filter("same party count", |(a, b)| a.num_parties() == b.num_parties())
    ) {
        let (t1, t2) = (c1.to_state().unwrap(), c2.to_state().unwrap());
        prop_assume!(!t1.is_zero() && !t2.is_zero());
        let w1 = ghz_to_state_operators(&c1, &t1).unwrap();
        let w2 = ghz_to_state_operators(&c2, &t2).unwrap();
        let both = direct_sum_witness(&w1, &w2).unwrap();
        prop_assert_eq!(both.verify(0.0).unwrap(), 0.0);
        prop_assert_eq!(&both.target, &direct_sum(&t1, &t2).unwrap());
        // breaking one block breaks the sum
        let mut broken = w1.ops.clone().into_ops();
        let (r, c) = (0, 0);
        let v = broken[1].get(r, c).clone();
        broken[1].set(r, c, &v + &Scalar::int(7));
        let broken = LocalOperatorSet::new(broken).unwrap();
        if ConversionWitness::new(w1.source.clone(), w1.target.clone(), broken.clone()).is_err() {
            let mut ops2 = w2.ops.clone();
            ops2.scale_party(0, &(&w1.scale / &w2.scale));
            let combined = ConversionWitness::new(
                direct_sum(&w1.source, &w2.source).unwrap(),
                both.target.clone(),
                broken.direct_sum(&ops2).unwrap(),
            );
            prop_assert!(combined.is_err());
        }
    }

    #[test]
    fn elimination_is_exact_and_unimodular(
        (n, coeffs) in prop_oneof![Just(2usize), Just(3usize)].prop_flat_map(|n| {
            let pats = patterns(n);
            (Just(n), prop::collection::vec(prop::option::of(nonzero_rational()), pats.len()))
        })
    ) {
        let coeffs: BTreeMap<SlotPattern, Scalar> = patterns(n)
            .into_iter()
            .zip(coeffs)
            .filter_map(|(p, c)| c.map(|c| (p, c)))
            .collect();
        let e = lemma_elimination(4, n, &coeffs).unwrap();
        prop_assert_eq!(e.witness.verify(0.0).unwrap(), 0.0);
        prop_assert_eq!(e.witness.scale.clone(), Scalar::one());
        for step in &e.steps {
            prop_assert_eq!(step.operator.determinant().unwrap(), Scalar::one());
        }
    }
}
