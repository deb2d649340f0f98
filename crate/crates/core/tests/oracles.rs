//! Hand-derived values and brute-force recomputations checked against the
//! library pipelines.

use segre_core::algebra::rank::{det_series, rank};
use segre_core::algebra::{parse_series, GaussianRational, Order, Series, SeriesMap, VarSpace, VectorField};
use segre_core::chains::{gamma, Chart, Parity};
use segre_core::invariants::{segre_invariants, ProfileOptions};
use segre_core::lie::{generators, span_dims, SpanOptions};
use segre_core::manifold::{Basepoint, CRManifold};

fn mf(m: usize, d: usize, e: &[&str]) -> CRManifold {
    CRManifold::parse(m, d, e, Order::Exact).unwrap()
}

/// Span dimensions at the origin using every bracket tree (not only
/// left-normed ones), without any pruning beyond dropping zero fields.
fn all_trees_dims(gens: &[VectorField], max_len: usize) -> Vec<usize> {
    let mut by_len: Vec<Vec<VectorField>> = vec![Vec::new(), gens.to_vec()];
    let n = gens[0].space().len();
    let origin = vec![GaussianRational::zero(); n];
    let mut dims = Vec::new();
    let mut values: Vec<Vec<GaussianRational>> = Vec::new();
    for len in 1..=max_len {
        if len >= 2 {
            let mut level: Vec<VectorField> = Vec::new();
            for i in 1..len {
                for x in &by_len[i] {
                    for y in &by_len[len - i] {
                        let b = x.bracket(y).unwrap();
                        if !b.is_zero() && !level.contains(&b) {
                            level.push(b);
                        }
                    }
                }
            }
            by_len.push(level);
        }
        values.extend(by_len[len].iter().map(|f| f.eval(&origin).unwrap()));
        dims.push(rank(&values));
    }
    dims
}

fn check_ladder(m: &CRManifold, max_len: usize) {
    let oracle = all_trees_dims(&generators(m).unwrap(), max_len);
    let (dims, _) = span_dims(m, &Basepoint::Origin, max_len, &SpanOptions::default()).unwrap();
    assert_eq!(dims[..], oracle[..dims.len()]);
    // once full, the oracle stays full
    assert!(oracle[dims.len() - 1..].iter().all(|&d| d == dims[dims.len() - 1]));
}

#[test]
fn bracket_spans_match_all_trees() {
    check_ladder(&mf(1, 1, &["w1*zeta1"]), 4);
    check_ladder(&mf(1, 1, &["w1^2*zeta1^2"]), 5);
    check_ladder(&mf(1, 2, &["w1*zeta1", "w1*zeta1*(w1+zeta1)"]), 4);
    check_ladder(
        &mf(1, 4, &["w1*zeta1", "w1*zeta1*(w1+zeta1)", "w1*zeta1*(w1^2+zeta1^2)", "w1^2*zeta1^2"]),
        4,
    );
    check_ladder(&mf(2, 2, &["w1*zeta1", "w2*zeta2"]), 3);
}

#[test]
fn quartic_chains_match_hand_expansion() {
    let m = mf(1, 1, &["w1^2*zeta1^2"]);
    let cs = VarSpace::chain(1, 5, None);
    let p = |s: &str| parse_series(s, &cs, Order::Exact).unwrap();
    // (w, z, zeta, xi) with w_j written u{j}_1
    let s3 = "i*u2_1^2*(u3_1^2 + 2*u1_1*u3_1)";
    let s4 = format!("{s3} - i*((u2_1 + u4_1)*(u1_1 + u3_1))^2");
    let expected = [
        vec!["u1_1".to_string(), "0".into(), "0".into(), "0".into()],
        vec!["u1_1".into(), "0".into(), "u2_1".into(), "-i*u1_1^2*u2_1^2".into()],
        vec!["u1_1 + u3_1".into(), s3.into(), "u2_1".into(), "-i*u1_1^2*u2_1^2".into()],
        vec!["u1_1 + u3_1".into(), s3.into(), "u2_1 + u4_1".into(), s4.clone()],
        vec![
            "u1_1 + u3_1 + u5_1".into(),
            format!("{s4} + i*((u1_1 + u3_1 + u5_1)*(u2_1 + u4_1))^2"),
            "u2_1 + u4_1".into(),
            s4.clone(),
        ],
    ];
    for (k, exp) in expected.iter().enumerate() {
        let c = gamma(&m, k + 1, &Basepoint::Origin, Parity::L).unwrap();
        let sp = c.map.domain().clone();
        // move the hand-written components into the k-parameter space
        let mapping: Vec<usize> = (0..cs.len()).map(|v| if v <= k { v } else { 0 }).collect();
        for (i, e) in exp.iter().enumerate() {
            let want = p(e).embed(&sp, &mapping);
            assert_eq!(c.map.component(i), &want, "Gamma_{} component {}", k + 1, i);
        }
    }
}

#[test]
fn cubic_gamma4_is_a_submersion() {
    let m = mf(1, 2, &["w1*zeta1", "w1*zeta1*(w1+zeta1)"]);
    let cs = VarSpace::chain(1, 4, None);
    let p = |s: &str| parse_series(s, &cs, Order::Exact).unwrap();
    // rigid and real: theta(zeta, w) = thetabar(zeta, w) with the roles swapped
    let (w1, z1) = ("(u1_1)", "(u2_1)");
    let (w3, z4) = ("(u1_1 + u3_1)", "(u2_1 + u4_1)");
    let xi2 = [format!("-i*{w1}*{z1}"), format!("-i*{w1}*{z1}*({w1}+{z1})")];
    let z3 = [
        format!("{} + i*{w3}*{z1}", xi2[0]),
        format!("{} + i*{w3}*{z1}*({w3}+{z1})", xi2[1]),
    ];
    let xi4 = [
        format!("{} - i*{z4}*{w3}", z3[0]),
        format!("{} - i*{z4}*{w3}*({z4}+{w3})", z3[1]),
    ];
    let comps = vec![p(w3), p(z4), p(&xi4[0]), p(&xi4[1])];
    let jac = SeriesMap::new(&cs, &cs, comps.clone()).unwrap().jacobian(&[0, 1, 2, 3]).unwrap();
    assert!(!det_series(&jac).is_zero());
    let c = gamma(&m, 4, &Basepoint::Origin, Parity::L).unwrap();
    let chart = c.in_chart(&m, Chart::WZetaXi).unwrap();
    for (a, b) in chart.components().iter().zip(&comps) {
        assert_eq!(a, b);
    }
    let inv = segre_invariants(&m, &Basepoint::Origin, &ProfileOptions::default()).unwrap();
    assert_eq!(inv.profile.r, [1, 2, 3, 4]);
}

#[test]
fn quartic_witness_minor() {
    // leading 3x3 minor of the (w, zeta, xi) Jacobian of Gamma_5 at
    // (a, b, 0, -b, -a) equals 2i*a*b^2
    let m = mf(1, 1, &["w1^2*zeta1^2"]);
    let c = gamma(&m, 5, &Basepoint::Origin, Parity::L).unwrap();
    let chart = c.in_chart(&m, Chart::WZetaXi).unwrap();
    let jac = chart.jacobian(&c.chain_params()).unwrap();
    let minor: Vec<Vec<Series>> = jac.iter().map(|r| r[..3].to_vec()).collect();
    let det = det_series(&minor);
    for (a, b) in [(1i64, 1i64), (2, 3), (-1, 5)] {
        let g = GaussianRational::from_int;
        let pt = vec![g(a), g(b), g(0), g(-b), g(-a)];
        assert!(chart.evaluate(&pt).unwrap().iter().all(GaussianRational::is_zero));
        let want = &(&GaussianRational::from_parts(0, 1, 2, 1) * &g(a)) * &g(b * b);
        assert_eq!(det.eval(&pt).unwrap(), want);
    }
}
