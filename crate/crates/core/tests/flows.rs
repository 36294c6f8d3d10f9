use mlradon_core::flows::{
    alphas, flow, sample_ball, sample_box_ball, weak_type_ratio, BallSpec, FlowConfig, OccupancyGrid, PointCloud,
    Resolution, SetSample,
};
use mlradon_core::symalg::{parse_polynomial, CompiledField, CompiledMap};
use mlradon_core::{PolyMap, PolyVectorField};

fn fields(n: usize, comps: &[&[&str]]) -> Vec<CompiledField> {
    comps
        .iter()
        .map(|c| PolyVectorField::new(c.iter().map(|s| parse_polynomial(s, n).unwrap()).collect()).unwrap().compile())
        .collect()
}

fn maps(n: usize, comps: &[&[&str]]) -> Vec<CompiledMap> {
    comps
        .iter()
        .map(|c| PolyMap::new(c.iter().map(|s| parse_polynomial(s, n).unwrap()).collect()).unwrap().compile())
        .collect()
}

fn lw() -> Vec<CompiledField> {
    fields(2, &[&["1", "0"], &["0", "1"]])
}

fn heisenberg() -> Vec<CompiledField> {
    fields(3, &[&["1", "0", "0"], &["0", "1", "x1"]])
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn rk4_converges_at_fourth_order() {
    let f = &fields(1, &[&["x1"]])[0];
    let err = |steps: u32| {
        let cfg = FlowConfig { steps_per_unit: steps, ..Default::default() };
        (flow(f, &[1.0], 1.0, &cfg).unwrap()[0] - std::f64::consts::E).abs()
    };
    for steps in [8, 16, 32] {
        let ratio = err(steps) / err(2 * steps);
        assert!(ratio > 14.0 && ratio < 18.0, "steps {steps}: ratio {ratio}");
    }
}

#[test]
fn flows_compose_additively() {
    let f = &fields(2, &[&["1 + x2^2", "-x1 + x1*x2"]])[0];
    let cfg = FlowConfig::default();
    for (s, t) in [(0.3, 0.4), (0.5, -0.2), (-0.25, -0.25)] {
        let direct = flow(f, &[0.1, 0.2], s + t, &cfg).unwrap();
        let split = flow(f, &flow(f, &[0.1, 0.2], s, &cfg).unwrap(), t, &cfg).unwrap();
        for (a, b) in direct.iter().zip(&split) {
            assert!((a - b).abs() < 1e-7, "{direct:?} vs {split:?}");
        }
    }
}

#[test]
fn balls_nest_as_radii_grow() {
    let h = heisenberg();
    let cfg = FlowConfig::with_seed(11);
    let small = BallSpec::new(vec![0.0; 3], vec![0.1, 0.08]).with_samples(60_000);
    let large = BallSpec::new(vec![0.0; 3], vec![0.12, 0.1]).with_samples(60_000);
    let a = sample_ball(&h, &small, &cfg).unwrap();
    let b = sample_ball(&h, &large, &cfg).unwrap();
    let res = Resolution::PerAxis(vec![0.01, 0.01, 0.002]);
    let ga = OccupancyGrid::from_cloud(&a, &res).unwrap();
    let gb = OccupancyGrid::from_cloud(&b, &res).unwrap();
    let stray = ga.cells_outside(&gb).unwrap();
    assert!((stray as f64) <= 0.01 * ga.count() as f64, "{stray} of {}", ga.count());
}

#[test]
fn sampling_ignores_worker_count() {
    let h = heisenberg();
    let spec = BallSpec::new(vec![0.0; 3], vec![0.1, 0.1]).with_samples(10_000);
    let cfg = FlowConfig::with_seed(7);
    let one = in_pool(1, || sample_ball(&h, &spec, &cfg).unwrap());
    let four = in_pool(4, || sample_ball(&h, &spec, &cfg).unwrap());
    assert_eq!(one, four);
    let b1 = in_pool(1, || sample_box_ball(&h, &[0.0; 3], &[0.1, 0.1], &[1, 2, 1], 5000, &cfg).unwrap());
    let b4 = in_pool(3, || sample_box_ball(&h, &[0.0; 3], &[0.1, 0.1], &[1, 2, 1], 5000, &cfg).unwrap());
    assert_eq!(b1, b4);
}

#[test]
fn loomis_whitney_box_ball_is_the_rectangle() {
    let cloud = sample_box_ball(&lw(), &[0.5, 0.5], &[0.2, 0.1], &[1, 2], 100_000, &FlowConfig::default()).unwrap();
    let bb = cloud.bounding_box();
    assert!((bb[0].0 - 0.3).abs() < 1e-3 && (bb[0].1 - 0.7).abs() < 1e-3, "{bb:?}");
    assert!((bb[1].0 - 0.4).abs() < 1e-3 && (bb[1].1 - 0.6).abs() < 1e-3, "{bb:?}");
    let h = 0.1 / 32.0;
    let v = OccupancyGrid::from_cloud(&cloud, &Resolution::Uniform(h)).unwrap().measure();
    assert!((v / (4.0 * 0.2 * 0.1) - 1.0).abs() < 0.05, "{v}");
}

#[test]
fn box_ball_sits_inside_a_dilated_ball() {
    // |t|_1 ≤ n on the box, so B_j(δ) ⊆ B(nδ)
    let h = heisenberg();
    let cfg = FlowConfig::with_seed(3);
    let res = Resolution::PerAxis(vec![0.02, 0.02, 0.004]);
    let boxed = sample_box_ball(&h, &[0.0; 3], &[0.1, 0.1], &[1, 2, 1], 40_000, &cfg).unwrap();
    let ball = sample_ball(&h, &BallSpec::new(vec![0.0; 3], vec![0.3, 0.3]).with_samples(200_000), &cfg).unwrap();
    let gb = OccupancyGrid::from_cloud(&boxed, &res).unwrap();
    let gl = OccupancyGrid::from_cloud(&ball, &res).unwrap();
    assert!(gb.measure() <= gl.measure());
    let stray = gb.cells_outside(&gl).unwrap();
    assert!((stray as f64) <= 0.02 * gb.count() as f64, "{stray} of {}", gb.count());
}

#[test]
fn heisenberg_box_ball_is_comparable_to_the_ball() {
    let h = heisenberg();
    let cfg = FlowConfig::with_seed(5);
    let delta = [0.1, 0.1];
    let res = Resolution::PerAxis(vec![0.005, 0.005, 0.0005]);
    let ball = sample_ball(&h, &BallSpec::new(vec![0.0; 3], delta.to_vec()).with_samples(200_000), &cfg).unwrap();
    let vb = OccupancyGrid::from_cloud(&ball, &res).unwrap().measure();
    let best = [[1, 2, 1], [2, 1, 2], [1, 2, 2], [2, 1, 1]]
        .iter()
        .map(|seq| {
            let c = sample_box_ball(&h, &[0.0; 3], &delta, seq, 200_000, &cfg).unwrap();
            OccupancyGrid::from_cloud(&c, &res).unwrap().measure()
        })
        .fold(0.0, f64::max);
    // empirical constant: both are ≍ δ₁²δ₂²
    let ratio = best / vb;
    assert!(ratio > 0.5 && ratio < 20.0, "{ratio}");
}

#[test]
fn ball_alphas_dominate_radii() {
    let h = heisenberg();
    let m = maps(3, &[&["x2", "x3"], &["x1", "x3 - x1*x2"]]);
    let cfg = FlowConfig::with_seed(2);
    for s in [0.2, 0.1, 0.05] {
        let cloud = sample_ball(&h, &BallSpec::new(vec![0.0; 3], vec![s, s]).with_samples(100_000), &cfg).unwrap();
        let g = OccupancyGrid::from_cloud(&cloud, &Resolution::Adaptive(32)).unwrap();
        let sample = SetSample::matched(g, m.clone(), &[0.0; 3]);
        let a = alphas(&sample).unwrap();
        for aj in &a {
            // coarea: |B| / |π_j(B)| ≳ δ_j, with empirical constant 1/4
            assert!(*aj > 0.25 * s, "s = {s}: {a:?}");
        }
    }
}

#[test]
fn loomis_whitney_weak_type_ratio_is_scale_free() {
    let m = maps(2, &[&["x2"], &["x1"]]);
    let cfg = FlowConfig::with_seed(4);
    let mut ratios = Vec::new();
    for s in [0.2, 0.1, 0.05] {
        let cloud = sample_ball(&lw(), &BallSpec::new(vec![0.0; 2], vec![s, s]).with_samples(50_000), &cfg).unwrap();
        let g = OccupancyGrid::from_cloud(&cloud, &Resolution::Adaptive(48)).unwrap();
        ratios.push(weak_type_ratio(&SetSample::matched(g, m.clone(), &[0.0; 2]), &[1.0, 1.0]).unwrap());
    }
    // α₁α₂/|B| with α_j ≈ δ_j and |B| = 2s²
    for r in &ratios {
        assert!((r - 0.5).abs() < 0.05, "{ratios:?}");
    }
}

#[test]
fn point_cloud_rejects_non_finite() {
    assert!(PointCloud::new(2, vec![0.0, f64::NAN]).is_err());
    assert!(PointCloud::new(2, vec![0.0, 1.0, 2.0]).is_err());
}
