mod common;

use gradiso::classify::{classify, classify_dir, CorpusReport, EvidenceKind};
use gradiso::groebner::{self, Limits, TermOrder};
use gradiso::hilbert::{self, HilbertSeries, RationalSeries};
use gradiso::isotest::{self, IsoOptions, Outcome, Reason, Stage};
use gradiso::TruncatedAlgebra;
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn read_dir(name: &str) -> Vec<(String, String)> {
    let dir = common::fixture_dir(name);
    std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read_to_string(e.path()).unwrap(),
            )
        })
        .collect()
}

#[test]
fn fixture_series_from_both_engines() {
    let expected = [
        ("C2.pres", "1/(1-t)"),
        ("C4.pres", "1/(1-t)"),
        ("C8.pres", "1/(1-t)"),
        ("C2xC2.pres", "1/(1-t)^2"),
        ("C4xC2.pres", "1/(1-t)^2"),
        ("D8.pres", "1/(1-t)^2"),
        ("C2xC2xC2.pres", "1/(1-t)^3"),
        ("Q8.pres", "(1+2t+2t^2+t^3)/(1-t^4)"),
    ];
    for (file, series) in expected {
        let p = common::load("orders_dividing_8", file);
        let want = RationalSeries::parse(series).unwrap();
        let gb = groebner::groebner(
            &p.algebra,
            &p.relations,
            TermOrder::Degrevlex,
            None,
            Limits::default(),
        )
        .unwrap();
        match gb.series() {
            HilbertSeries::Exact(s) => assert_eq!(s, want, "{file}"),
            other => panic!("{file}: {other}"),
        }
        let dims: Vec<BigInt> = TruncatedAlgebra::build(&p, 16)
            .unwrap()
            .dims()
            .into_iter()
            .map(BigInt::from)
            .collect();
        assert_eq!(
            hilbert::dims_from_series(&want, 16).unwrap(),
            dims,
            "{file}"
        );
    }
}

#[test]
fn orders_dividing_4() {
    let r = classify_dir(
        &common::fixture_dir("orders_dividing_4"),
        &IsoOptions::default(),
    )
    .unwrap();
    assert_eq!(r.classes.len(), 3);
    assert_eq!(r.totals.presentations, 3);
}

#[test]
fn orders_dividing_8_merges_only_the_cyclic_pair() {
    let r = classify_dir(
        &common::fixture_dir("orders_dividing_8"),
        &IsoOptions::default(),
    )
    .unwrap();
    let merged: Vec<_> = r.classes.iter().filter(|c| c.len() > 1).collect();
    assert_eq!(r.classes.len(), 7);
    assert_eq!(
        merged,
        vec![&vec!["C4.pres".to_string(), "C8.pres".to_string()]]
    );
}

#[test]
fn classification_ignores_input_order() {
    let base = classify(read_dir("orders_dividing_8"), &IsoOptions::default());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..5 {
        let mut inputs = read_dir("orders_dividing_8");
        inputs.shuffle(&mut rng);
        assert_eq!(classify(inputs, &IsoOptions::default()), base);
    }
}

#[test]
fn merged_pairs_reverify() {
    let r = classify_dir(
        &common::fixture_dir("orders_dividing_8"),
        &IsoOptions::default(),
    )
    .unwrap();
    let mut seen = 0;
    for e in r
        .evidence
        .iter()
        .filter(|e| e.kind == EvidenceKind::Certificate)
    {
        let a = common::load("orders_dividing_8", &e.a);
        let b = common::load("orders_dividing_8", &e.b);
        let images = isotest::parse_certificate(&a, &b, e.certificate.as_ref().unwrap()).unwrap();
        assert!(isotest::verify_certificate(&a, &b, &images).unwrap());
        seen += 1;
    }
    assert_eq!(seen, 1);
}

#[test]
fn report_json_round_trip() {
    let r = classify_dir(
        &common::fixture_dir("orders_dividing_8"),
        &IsoOptions::default(),
    )
    .unwrap();
    let text = serde_json::to_string_pretty(&r).unwrap();
    let back: CorpusReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(serde_json::to_string_pretty(&back).unwrap(), text);
}

#[test]
fn symmetric_verdicts_on_fixtures() {
    let all = common::all_fixtures();
    for (na, a) in &all {
        for (nb, b) in &all {
            let x = isotest::graded_isomorphism(a, b, &IsoOptions::default()).unwrap();
            let y = isotest::graded_isomorphism(b, a, &IsoOptions::default()).unwrap();
            assert_eq!(x.outcome, y.outcome, "{na} {nb}");
            if na == nb {
                assert_eq!(x.outcome, Outcome::Isomorphic);
            }
        }
    }
}

#[test]
fn c4_c8_identity_certificate() {
    let a = common::load("orders_dividing_8", "C4.pres");
    let b = common::load("orders_dividing_8", "C8.pres");
    let v = isotest::graded_isomorphism(&a, &b, &IsoOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::Isomorphic);
    let cert = v.certificate.unwrap();
    assert_eq!((cert["x"].as_str(), cert["y"].as_str()), ("x", "y"));
}

#[test]
fn c2_c4_exhausted_with_stage_counts() {
    let a = common::load("orders_dividing_8", "C2.pres");
    let b = common::load("orders_dividing_8", "C4.pres");
    let fa = isotest::fingerprint(&a, 10).unwrap();
    let fb = isotest::fingerprint(&b, 10).unwrap();
    assert_eq!((&fa.dims, &fa.series), (&fb.dims, &fb.series));
    let v = isotest::graded_isomorphism(&a, &b, &IsoOptions::default()).unwrap();
    assert_eq!(v.outcome, Outcome::NotIsomorphic);
    match v.reason {
        Some(Reason::SearchExhausted { emptied_at: Some((gens, _)) }) => assert_eq!(gens, vec!["x"]),
        other => panic!("{other:?}"),
    }
    assert_eq!(v.statistics.enumerated, 0);
    // reverse direction: y can only go to x^2, and x^2 = 0 fails there
    let w = isotest::graded_isomorphism(&b, &a, &IsoOptions::unpruned()).unwrap();
    assert_eq!(w.outcome, Outcome::NotIsomorphic);
    assert_eq!(w.statistics.enumerated, 1);
    assert_eq!(w.statistics.pruned_by_stage[&Stage::Relations], 1);
    for opts in [IsoOptions::unpruned(), IsoOptions::oracle()] {
        assert_eq!(isotest::graded_isomorphism(&a, &b, &opts).unwrap().outcome, Outcome::NotIsomorphic);
    }
}
