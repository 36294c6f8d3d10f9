//! The bundled acceptance suite behind `mlradon verify`.
//!
//! Every criterion is deterministic for a fixed seed and its report carries no
//! timings, so two runs can be compared byte for byte.

use std::fmt::Write as _;

use mlradon_core::exponents::{b_of_p, p_of_b, sigma};
use mlradon_core::flows::{
    ball_volume, fmt9, necessity_witness_for_b, ratio_table, sample_ball, volume_vs_lambda, BallSpec, FlowConfig,
    VolumeConfig,
};
use mlradon_core::polytope::build_polytope;
use mlradon_core::symalg::{lie_bracket, rat};
use mlradon_core::words::expand_bracket;
use mlradon_core::{
    classify, BigRational, BracketTree, Catalog, Exponent, ExponentTuple, NewtonPolytope, PolyVectorField, Polynomial,
    Verdict, Word, WordCombination,
};
use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{chart_reports, render_chart};
use crate::spec::{builtin, ProblemSpec};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub lines: Vec<String>,
}

impl CriterionResult {
    fn new(id: u8, title: &'static str) -> Self {
        CriterionResult { id, title, passed: true, lines: Vec::new() }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    /// Records a check and folds it into the verdict.
    fn check(&mut self, ok: bool, s: impl Into<String>) {
        self.passed &= ok;
        self.lines.push(format!("{} {}", if ok { "ok  " } else { "FAIL" }, s.into()));
    }

    fn fail_with(mut self, e: CliError) -> Self {
        self.passed = false;
        self.lines.push(format!("error {e}"));
        self
    }

    pub fn verdict_line(&self) -> String {
        format!("{} criterion {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title)
    }

    pub fn render(&self) -> String {
        let mut s = format!("criterion {}: {}\n", self.id, self.title);
        for l in &self.lines {
            let _ = writeln!(s, "  {l}");
        }
        s + &self.verdict_line() + "\n"
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = format!("mlradon verify seed={}\n", self.seed);
        for c in &self.criteria {
            s += &c.render();
        }
        let passed = self.criteria.iter().filter(|c| c.passed).count();
        let _ = writeln!(s, "summary {passed}/{} passed", self.criteria.len());
        s
    }
}

pub fn run_suite(seed: u64) -> SuiteReport {
    SuiteReport {
        seed,
        criteria: vec![
            symbolic(seed),
            golden_polytopes(),
            exponent_calculus(seed),
            ball_calibration(seed),
            scaling_exponents(seed),
            chart_checks(seed),
            necessity_blow_up(seed),
        ],
    }
}

fn spec(name: &str) -> ProblemSpec {
    builtin(name).expect("bundled spec")
}

fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> Polynomial {
    let terms: Vec<(Vec<u32>, BigRational)> = (0..rng.random_range(0..=4))
        .filter_map(|_| {
            let e: Vec<u32> = (0..n).map(|_| rng.random_range(0..=3)).collect();
            let c = rat(rng.random_range(-4..=4), 1);
            (e.iter().sum::<u32>() <= 3).then_some((e, c))
        })
        .collect();
    Polynomial::from_terms(n, terms).expect("arity matches")
}

fn random_field(rng: &mut ChaCha8Rng, n: usize) -> PolyVectorField {
    PolyVectorField::new((0..n).map(|_| random_poly(rng, n)).collect()).expect("n components")
}

fn symbolic_checks(seed: u64, r: &mut CriterionResult) -> Result<(), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut anti, mut jacobi, mut nonzero) = (0, 0, 0);
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let (x, y, z) = (random_field(&mut rng, n), random_field(&mut rng, n), random_field(&mut rng, n));
        let xy = lie_bracket(&x, &y)?;
        if xy.try_add(&lie_bracket(&y, &x)?)?.is_zero() {
            anti += 1;
        }
        if !xy.is_zero() {
            nonzero += 1;
        }
        let sum = lie_bracket(&x, &lie_bracket(&y, &z)?)?
            .try_add(&lie_bracket(&y, &lie_bracket(&z, &x)?)?)?
            .try_add(&lie_bracket(&z, &xy)?)?;
        if sum.is_zero() {
            jacobi += 1;
        }
    }
    r.check(anti == 100, format!("antisymmetry exact on {anti}/100 triples"));
    r.check(jacobi == 100, format!("Jacobi exact on {jacobi}/100 triples"));
    r.line(format!("nonzero brackets [X,Y] {nonzero}/100"));

    let l = BracketTree::leaf;
    let tree = BracketTree::bracket(BracketTree::bracket(l(1), l(2)), BracketTree::bracket(l(3), l(4)));
    let w = |v: [usize; 4]| Word::new(v.to_vec(), 4).expect("letters in range");
    let expected = WordCombination::from_terms([(1, w([1, 2, 3, 4])), (-1, w([1, 2, 4, 3]))]);
    let got = expand_bracket(&tree);
    r.check(got == expected, format!("[[X1,X2],[X3,X4]] expands to {got}"));
    let gens: Vec<PolyVectorField> = (0..4).map(|_| random_field(&mut rng, 3)).collect();
    r.check(
        tree.evaluate(&gens)? == got.evaluate(&gens)?,
        "expansion agrees with direct evaluation on random fields",
    );
    Ok(())
}

/// Criterion 1: exact bracket identities.
pub fn symbolic(seed: u64) -> CriterionResult {
    let mut r = CriterionResult::new(1, "symbolic exactness");
    match symbolic_checks(seed, &mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}

const GOLDEN: [(&str, &[&[u32]]); 4] = [
    ("lw2", &[&[1, 1]]),
    ("lw3", &[&[1, 1, 1]]),
    ("tao-wright", &[&[1, 2], &[2, 1]]),
    ("heisenberg", &[&[2, 2]]),
];

fn minimal_generators(s: &ProblemSpec, cap: usize) -> Result<NewtonPolytope, CliError> {
    let origin = vec![BigRational::zero(); s.n];
    let c = Catalog::truncated(s.fields.clone(), cap, &s.options.eps, &origin)?;
    Ok(build_polytope(&c, &origin)?)
}

fn golden_checks(r: &mut CriterionResult) -> Result<(), CliError> {
    for (name, expected) in GOLDEN {
        let s = spec(name);
        let want: Vec<Vec<u32>> = expected.iter().map(|g| g.to_vec()).collect();
        let base = s.options.max_word_len;
        for cap in [base, base + 1] {
            let p = minimal_generators(&s, cap)?;
            r.check(p.minimal_generators() == want.as_slice(), format!("{name} word length {cap}: {p}"));
        }
    }
    Ok(())
}

/// Criterion 2: Newton polytopes of the bundled examples.
pub fn golden_polytopes() -> CriterionResult {
    let mut r = CriterionResult::new(2, "polytope golden set");
    match golden_checks(&mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}

fn random_exponent(rng: &mut ChaCha8Rng, max: i64) -> Exponent {
    if rng.random_range(0..8) == 0 {
        return Exponent::Infinite;
    }
    let den = rng.random_range(1..=9);
    Exponent::Finite(rat(rng.random_range(den..=max * den), den))
}

fn exponent_checks(seed: u64, r: &mut CriterionResult) -> Result<(), CliError> {
    let p: ExponentTuple = "2,2,2".parse()?;
    let b = b_of_p(&p)?;
    r.check(b == vec![BigRational::one(); 3], format!("b(2,2,2) = ({})", join(&b)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x3);
    let mut exact = 0;
    let mut tried = 0;
    while tried < 1000 {
        let k = rng.random_range(2..=4);
        let p = ExponentTuple::new((0..k).map(|_| random_exponent(&mut rng, 3)).collect())?;
        if sigma(&p) <= BigRational::one() {
            continue;
        }
        tried += 1;
        if p_of_b(&b_of_p(&p)?)? == p {
            exact += 1;
        }
    }
    r.check(exact == 1000, format!("p_of_b(b_of_p(p)) = p on {exact}/1000 admissible tuples"));

    let (mut agree, mut trivial) = (0, 0);
    for _ in 0..1000 {
        let k = rng.random_range(2..=4);
        let p = ExponentTuple::new((0..k).map(|_| random_exponent(&mut rng, 6)).collect())?;
        let poly = NewtonPolytope::from_generators(k, vec![vec![1; k]])?;
        let holder = classify(&p, &poly)?.verdict == Verdict::HolderTrivial;
        let small = sigma(&p) <= BigRational::one();
        trivial += usize::from(small);
        if holder == small {
            agree += 1;
        }
    }
    r.check(agree == 1000, format!("HOLDER_TRIVIAL iff sigma <= 1 on {agree}/1000 tuples ({trivial} with sigma <= 1)"));
    Ok(())
}

fn join(v: &[BigRational]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Criterion 3: the `p ↔ b` correspondence.
pub fn exponent_calculus(seed: u64) -> CriterionResult {
    let mut r = CriterionResult::new(3, "exponent calculus");
    match exponent_checks(seed, &mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}

fn calibration_checks(seed: u64, r: &mut CriterionResult) -> Result<(), CliError> {
    let s = spec("lw2");
    let fields: Vec<_> = s.fields.iter().map(|f| f.compile()).collect();
    let cfg = FlowConfig::with_seed(seed);
    let h = 0.1 / 32.0;
    let volume = |delta: Vec<f64>| -> Result<f64, CliError> {
        let cloud = sample_ball(&fields, &BallSpec::new(vec![0.0; 2], delta).with_samples(200_000), &cfg)?;
        Ok(ball_volume(&cloud, h)?)
    };
    let v = volume(vec![0.2, 0.1])?;
    let v2 = volume(vec![0.4, 0.2])?;
    r.line(format!("N 200000 h {}", fmt9(h)));
    r.check((v / 0.04 - 1.0).abs() <= 0.05, format!("|B(0;(0.2,0.1))| = {} (target 0.04 within 5%)", fmt9(v)));
    let ratio = v2 / v;
    r.check((ratio / 4.0 - 1.0).abs() <= 0.10, format!("doubling ratio {} (target 4 within 10%)", fmt9(ratio)));
    Ok(())
}

/// Criterion 4: absolute volume on the Loomis–Whitney plane.
pub fn ball_calibration(seed: u64) -> CriterionResult {
    let mut r = CriterionResult::new(4, "ball volume calibration");
    match calibration_checks(seed, &mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}

fn scaling_checks(seed: u64, r: &mut CriterionResult) -> Result<(), CliError> {
    let cfg = FlowConfig::with_seed(seed);
    let vcfg = VolumeConfig::default();
    let radii = [0.2, 0.1, 0.05, 0.025];
    for (name, target) in [("heisenberg", 4.0), ("tao-wright", 3.0)] {
        let s = spec(name);
        let origin = vec![BigRational::zero(); s.n];
        let c = Catalog::truncated(s.fields.clone(), s.options.max_word_len, &s.options.eps, &origin)?;
        let predicted = build_polytope(&c, &origin)?.minimal_generators().iter().map(|g| g.iter().sum::<u32>()).min();
        let tuples = c.enumerate_tuples(&origin)?;
        let fields: Vec<_> = s.fields.iter().map(|f| f.compile()).collect();
        let deltas: Vec<Vec<f64>> = radii.iter().map(|&x| vec![x; s.k]).collect();
        let t = volume_vs_lambda(&fields, &tuples, &vec![0.0; s.n], &deltas, &vcfg, &cfg)?;
        for row in &t.rows {
            r.line(format!("{name} s {} |B| {} |B|/|Lambda| {}", fmt9(row.delta[0]), fmt9(row.volume), fmt9(row.ratio)));
        }
        r.line(format!("{name} min over generators of 1.g = {}", predicted.map_or("none".into(), |v| v.to_string())));
        r.check((t.slope - target).abs() <= 0.3, format!("{name} slope {} (target {target} within 0.3)", fmt9(t.slope)));
    }
    Ok(())
}

/// Criterion 5: log-log slopes of ball volumes.
pub fn scaling_exponents(seed: u64) -> CriterionResult {
    let mut r = CriterionResult::new(5, "scaling exponents");
    match scaling_checks(seed, &mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}

/// Deviations below this are rounding noise and need not keep shrinking.
const DEVIATION_FLOOR: f64 = 1e-8;

fn chart_checks_inner(seed: u64, r: &mut CriterionResult) -> Result<(), CliError> {
    let cfg = FlowConfig::with_seed(seed);
    let ks = [4.0, 8.0, 16.0, 32.0];
    for name in ["lw2", "tao-wright", "heisenberg"] {
        let s = spec(name);
        let reports = chart_reports(&s, &cfg, &vec![0.05; s.k], &ks, 200, 8)?;
        for (label, rep) in &reports {
            for l in render_chart(label, rep).lines() {
                r.line(format!("{name} {}", l.trim_start()));
            }
        }
        let at8 = &reports[1].1;
        r.check(at8.y_at_zero <= 1e-5, format!("{name} K=8 Y(0) deviation {}", fmt9(at8.y_at_zero)));
        r.check(
            at8.det_min >= 0.5 && at8.det_max <= 2.0,
            format!("{name} K=8 |det Y| in [{},{}]", fmt9(at8.det_min), fmt9(at8.det_max)),
        );
        let devs: Vec<f64> = reports.iter().map(|(_, rep)| rep.y_deviation).collect();
        let monotone = devs.windows(2).all(|w| w[1] < w[0] || w[0].max(w[1]) < DEVIATION_FLOOR);
        let shown: Vec<String> = devs.iter().map(|&d| fmt9(d)).collect();
        r.check(monotone, format!("{name} max|Y - I| over K = 4,8,16,32: {}", shown.join(" ")));
    }
    Ok(())
}

/// Criterion 6: the exponential chart at the origin.
pub fn chart_checks(seed: u64) -> CriterionResult {
    let mut r = CriterionResult::new(6, "chart lemmas");
    match chart_checks_inner(seed, &mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}

fn witness_checks(seed: u64, r: &mut CriterionResult) -> Result<(), CliError> {
    let s = spec("lw2");
    let origin = vec![BigRational::zero(); s.n];
    let c = Catalog::truncated(s.fields.clone(), s.options.max_word_len, &s.options.eps, &origin)?;
    let poly = build_polytope(&c, &origin)?;
    let fields: Vec<_> = s.fields.iter().map(|f| f.compile()).collect();
    let maps: Vec<_> = s.maps.as_ref().expect("lw2 is given by maps").iter().map(|m| m.compile()).collect();
    let cfg = FlowConfig::with_seed(seed);
    let vcfg = VolumeConfig::default();
    let d0 = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];

    let b = vec![rat(1, 2), rat(1, 2)];
    let (sep, t) = necessity_witness_for_b(&fields, &maps, &poly, &b, &d0, &vcfg, &cfg)?;
    r.line(format!("b ({}) a ({}) margin {}", join(&b), join(&sep.a), sep.margin));
    for row in &t.rows {
        r.line(format!("delta0 {} |Omega| {} ratio {}", fmt9(row.delta0), fmt9(row.omega), fmt9(row.ratio)));
    }
    r.line(format!("smallest step growth {}", fmt9(t.min_step_growth())));
    r.check(t.is_increasing(), "ratio increases as delta0 shrinks");
    r.check(t.cumulative_growth() >= 3.0, format!("cumulative growth {} (at least 3)", fmt9(t.cumulative_growth())));

    // b = (2,2) lies inside P; same a
    let control = ratio_table(&fields, &maps, &vec![0.0; s.n], &sep.as_f64(), &[2.0, 2.0], &d0, &vcfg, &cfg)?;
    for row in &control.rows {
        r.line(format!("control delta0 {} ratio {}", fmt9(row.delta0), fmt9(row.ratio)));
    }
    let band = control.max_over_first();
    r.check(band <= 2.0, format!("control b (2,2) max ratio over first {} (at most 2)", fmt9(band)));
    Ok(())
}

/// Criterion 7: blow-up of the restricted weak-type ratio outside `P`.
pub fn necessity_blow_up(seed: u64) -> CriterionResult {
    let mut r = CriterionResult::new(7, "necessity blow-up");
    match witness_checks(seed, &mut r) {
        Ok(()) => r,
        Err(e) => r.fail_with(e),
    }
}
