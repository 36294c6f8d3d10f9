use mlradon_core::polytope::build_polytope;
use mlradon_core::symalg::{kernel_field, parse_polynomial};
use mlradon_core::{BigRational, Catalog, CatalogCaps, PolyMap, PolyVectorField};
use num::Zero;

fn field(n: usize, comps: &[&str]) -> PolyVectorField {
    PolyVectorField::new(comps.iter().map(|c| parse_polynomial(c, n).unwrap()).collect()).unwrap()
}

fn kernels(n: usize, maps: &[&[&str]]) -> Vec<PolyVectorField> {
    maps.iter()
        .map(|m| kernel_field(&PolyMap::new(m.iter().map(|c| parse_polynomial(c, n).unwrap()).collect()).unwrap()).unwrap())
        .collect()
}

fn minimal(gens: Vec<PolyVectorField>, len: usize) -> Vec<Vec<u32>> {
    let n = gens[0].dim();
    let cat = Catalog::new(gens, CatalogCaps::with_word_len(len)).unwrap();
    build_polytope(&cat, &vec![BigRational::zero(); n]).unwrap().minimal_generators().to_vec()
}

fn check(gens: Vec<PolyVectorField>, expected: &[&[u32]]) {
    let expected: Vec<Vec<u32>> = expected.iter().map(|g| g.to_vec()).collect();
    for len in [3, 4] {
        assert_eq!(minimal(gens.clone(), len), expected, "word length {len}");
    }
}

#[test]
fn loomis_whitney_plane() {
    check(vec![field(2, &["1", "0"]), field(2, &["0", "1"])], &[&[1, 1]]);
}

#[test]
fn loomis_whitney_space() {
    check(vec![field(3, &["1", "0", "0"]), field(3, &["0", "1", "0"]), field(3, &["0", "0", "1"])], &[&[1, 1, 1]]);
}

#[test]
fn tao_wright_model_from_fields_and_maps() {
    check(vec![field(2, &["1", "0"]), field(2, &["1", "x1"])], &[&[1, 2], &[2, 1]]);
    check(kernels(2, &[&["x2"], &["x2 - x1^2/2"]]), &[&[1, 2], &[2, 1]]);
}

#[test]
fn heisenberg_from_fields_and_maps() {
    check(vec![field(3, &["1", "0", "0"]), field(3, &["0", "1", "x1"])], &[&[2, 2]]);
    check(kernels(3, &[&["x2", "x3"], &["x1", "x3 - x1*x2"]]), &[&[2, 2]]);
}

#[test]
fn moment_curve_kernels_span() {
    // fibres of the second map are translates of the parabola (t, t²)
    let gens = kernels(3, &[&["x1", "x2"], &["x1 - x3", "x2 - x3^2"]]);
    let cat = Catalog::new(gens, CatalogCaps::with_word_len(4)).unwrap();
    assert!(cat.hormander_check(&vec![BigRational::zero(); 3]).unwrap().spans);
}
