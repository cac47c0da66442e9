use g2lab::exterior::{KForm, Vector};
use g2lab::g2::G2Structure;
use g2lab::liegeom::{
    bryant_identities_check, bryant_identities_for, ce_differential, cor_g2sub_check,
    parse_structure_constants, search_closed_g2, validate_closed_g2, write_structure_constants,
    SearchHit, SubmersionSplit, Verdict,
};
use g2lab::scalar::{Rational, Scalar};
use std::sync::OnceLock;

type Q = Rational;

fn hits() -> &'static [SearchHit] {
    static HITS: OnceLock<Vec<SearchHit>> = OnceLock::new();
    HITS.get_or_init(|| {
        let set: Vec<Q> = [0, 1, -1].iter().map(|&x| Q::from_i64(x)).collect();
        search_closed_g2(2, &set).unwrap()
    })
}

#[test]
fn search_finds_certified_algebras() {
    let g = G2Structure::<Q>::model();
    let hits = hits();
    assert!(hits.len() > 1);
    assert!(hits[0].alg.is_abelian());
    for h in hits {
        let closed = validate_closed_g2(&g, &h.alg).unwrap();
        assert_eq!(closed.tau2.norm_sq(), h.tau2_norm_sq);
        assert_eq!(h.alg.derived_dim(), h.derived_dim);
    }
    assert!(hits.iter().any(|h| !h.tau2_norm_sq.is_zero_within(0.0)));
}

#[test]
fn identities_hold_exactly_on_every_hit() {
    let g = G2Structure::<Q>::model();
    for h in hits() {
        let closed = validate_closed_g2(&g, &h.alg).unwrap();
        let r = bryant_identities_check(&g, &closed).unwrap();
        assert!(r.all_zero(0.0), "{:?}", r);
    }
}

#[test]
fn corrupted_torsion_is_detected() {
    let g = G2Structure::<Q>::model();
    let h = hits().iter().find(|h| !h.alg.is_abelian()).unwrap();
    let closed = validate_closed_g2(&g, &h.alg).unwrap();
    let bump = g.phi().interior(&Vector::basis(7, 0)).unwrap();
    let bad = &closed.tau2 + &bump;
    let r = bryant_identities_for(&g, &closed.alg, &closed.curvature, &bad).unwrap();
    assert!(r.max_residual() > 0.1);
    assert!(!r.p7.is_zero_within(0.0));
}

#[test]
fn hits_are_two_step_and_d_squared_vanishes() {
    let g = G2Structure::<Q>::model();
    for h in hits() {
        for &k in &h.center {
            for i in 0..7 {
                for j in 0..7 {
                    assert!(h.alg.c(i, k, j).is_zero_within(0.0));
                }
            }
        }
        for form in [g.phi(), g.psi()] {
            let d = ce_differential(&h.alg, form).unwrap();
            assert!(ce_differential(&h.alg, &d).unwrap().is_zero_within(0.0));
        }
        let e1 = KForm::<Q>::monomial(7, &[0], Q::from_i64(1));
        let d = ce_differential(&h.alg, &e1).unwrap();
        assert!(ce_differential(&h.alg, &d).unwrap().is_zero_within(0.0));
    }
}

#[test]
fn corollary_premises_fail_on_hits() {
    let g = G2Structure::<Q>::model();
    let mut checked = 0;
    for h in hits().iter().filter(|h| !h.alg.is_abelian()) {
        let vertical: Vec<usize> = if h.center == [5, 6] {
            vec![1, 2, 5, 6]
        } else {
            vec![3, 4, 5, 6]
        };
        assert!(h.center.iter().all(|c| vertical.contains(c)));
        let closed = validate_closed_g2(&g, &h.alg).unwrap();
        let split = SubmersionSplit::new(h.alg.clone(), &vertical).unwrap();
        let rep = cor_g2sub_check(&g, &closed, &split).unwrap();
        assert!(
            matches!(rep.verdict, Verdict::PremisesFail { .. }),
            "{:?}",
            rep
        );
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn text_format_round_trips_hits() {
    for h in hits() {
        let text = write_structure_constants(&h.alg, &["search hit".to_string()]);
        assert_eq!(parse_structure_constants(&text).unwrap(), h.alg);
    }
}
