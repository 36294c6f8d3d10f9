use mlradon_core::flows::{flow, FlowConfig};
use mlradon_core::symalg::{lie_bracket, parse_polynomial, PolyVectorField, Polynomial};
use mlradon_core::words::{expand_bracket, BracketTree, Word, WordCombination};
use mlradon_core::BigRational;
use num::BigInt;
use proptest::prelude::*;

fn field(n: usize, comps: &[&str]) -> PolyVectorField {
    PolyVectorField::new(comps.iter().map(|c| parse_polynomial(c, n).unwrap()).collect()).unwrap()
}

fn poly_strategy(n: usize) -> impl Strategy<Value = Polynomial> {
    let term = (prop::collection::vec(0u32..=3, n), -4i64..=4);
    prop::collection::vec(term, 0..4).prop_map(move |terms| {
        let terms = terms
            .into_iter()
            .filter(|(e, _)| e.iter().sum::<u32>() <= 3)
            .map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c))));
        Polynomial::from_terms(n, terms).unwrap()
    })
}

fn field_strategy(n: usize) -> impl Strategy<Value = PolyVectorField> {
    prop::collection::vec(poly_strategy(n), n).prop_map(|c| PolyVectorField::new(c).unwrap())
}

fn triple() -> impl Strategy<Value = (PolyVectorField, PolyVectorField, PolyVectorField)> {
    (1usize..=4).prop_flat_map(|n| (field_strategy(n), field_strategy(n), field_strategy(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric((x, y, _z) in triple()) {
        let xy = lie_bracket(&x, &y).unwrap();
        let yx = lie_bracket(&y, &x).unwrap();
        prop_assert!(xy.try_add(&yx).unwrap().is_zero());
    }

    #[test]
    fn jacobi_identity((x, y, z) in triple()) {
        let a = lie_bracket(&x, &lie_bracket(&y, &z).unwrap()).unwrap();
        let b = lie_bracket(&y, &lie_bracket(&z, &x).unwrap()).unwrap();
        let c = lie_bracket(&z, &lie_bracket(&x, &y).unwrap()).unwrap();
        prop_assert!(a.try_add(&b).unwrap().try_add(&c).unwrap().is_zero());
    }

    #[test]
    fn bracket_expansion_is_sound(gens in (2usize..=3).prop_flat_map(|n| prop::collection::vec(field_strategy(n), 3)),
                                  shape in 0usize..4) {
        let l = BracketTree::leaf;
        let tree = match shape {
            0 => BracketTree::bracket(l(1), BracketTree::bracket(l(2), l(3))),
            1 => BracketTree::bracket(BracketTree::bracket(l(1), l(2)), BracketTree::bracket(l(3), l(1))),
            2 => BracketTree::bracket(l(2), BracketTree::bracket(l(3), BracketTree::bracket(l(1), l(2)))),
            _ => BracketTree::bracket(BracketTree::bracket(l(3), l(2)), l(1)),
        };
        let direct = tree.evaluate(&gens).unwrap();
        let expanded = expand_bracket(&tree).evaluate(&gens).unwrap();
        prop_assert_eq!(direct, expanded);
    }
}

#[test]
fn four_letter_identity_coefficients() {
    let l = BracketTree::leaf;
    let tree = BracketTree::bracket(BracketTree::bracket(l(1), l(2)), BracketTree::bracket(l(3), l(4)));
    let w = |v: &[usize]| Word::new(v.to_vec(), 4).unwrap();
    let expected = WordCombination::from_terms([(1, w(&[1, 2, 3, 4])), (-1, w(&[1, 2, 4, 3]))]);
    assert_eq!(expand_bracket(&tree), expected);
}

/// `e^{-tY} e^{-tX} e^{tY} e^{tX}(x) = x + t²[X,Y](x) + O(t³)`.
fn commutator_defect(x: &PolyVectorField, y: &PolyVectorField, p: &[f64], t: f64) -> Vec<f64> {
    let cfg = FlowConfig { steps_per_unit: 4096, ..Default::default() };
    let (cx, cy) = (x.compile(), y.compile());
    let mut q = flow(&cx, p, t, &cfg).unwrap();
    q = flow(&cy, &q, t, &cfg).unwrap();
    q = flow(&cx, &q, -t, &cfg).unwrap();
    q = flow(&cy, &q, -t, &cfg).unwrap();
    q.iter().zip(p).map(|(a, b)| (a - b) / (t * t)).collect()
}

#[test]
fn bracket_matches_flow_commutator() {
    let cases = [
        (field(2, &["1", "0"]), field(2, &["1", "x1"])),
        (field(3, &["1", "0", "0"]), field(3, &["0", "1", "x1"])),
        (field(2, &["x2", "x1^2"]), field(2, &["1 + x1*x2", "-x1"])),
        (field(3, &["x2*x3", "1", "x1^2"]), field(3, &["0", "x3", "1 - x1"])),
    ];
    let p = [0.3, -0.2, 0.1];
    for (x, y) in &cases {
        let n = x.dim();
        let bracket = lie_bracket(x, y).unwrap().evaluate_f64(&p[..n]).unwrap();
        let mut last = f64::INFINITY;
        for t in [0.02, 0.01, 0.005] {
            let d = commutator_defect(x, y, &p[..n], t);
            let err = d.iter().zip(&bracket).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 30.0 * t, "{x} / {y}: t = {t}, err = {err}");
            assert!(err < last || err < 1e-6, "{x} / {y}: error did not shrink");
            last = err;
        }
    }
}
