use num::{BigRational, ToPrimitive};

use super::ball::{sample_ball, BallSpec, PointCloud};
use super::grid::{ratio_from_alphas, OccupancyGrid, Resolution, SetSample};
use super::integrate::FlowConfig;
use crate::error::{Error, Result};
use crate::exponents::{b_of_p, classify, ExponentTuple, Verdict};
use crate::polytope::{NewtonPolytope, SeparatingFunctional};
use crate::symalg::{CompiledField, CompiledMap};
use crate::words::{CompiledTuples, WordTuple};

/// Formats with 9 significant digits.
pub fn fmt9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Sampling and gridding choices shared by the volume experiments.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeConfig {
    pub samples: usize,
    /// Segments per sample; `None` means `3n`.
    pub segments: Option<usize>,
    pub resolution: Resolution,
}

impl Default for VolumeConfig {
    fn default() -> Self {
        VolumeConfig { samples: 200_000, segments: None, resolution: Resolution::Adaptive(48) }
    }
}

impl VolumeConfig {
    fn spec(&self, x0: &[f64], delta: &[f64]) -> BallSpec {
        let spec = BallSpec::new(x0.to_vec(), delta.to_vec()).with_samples(self.samples);
        match self.segments {
            Some(s) => spec.with_segments(s),
            None => spec,
        }
    }

    pub fn sample(&self, fields: &[CompiledField], x0: &[f64], delta: &[f64], cfg: &FlowConfig) -> Result<PointCloud> {
        sample_ball(fields, &self.spec(x0, delta), cfg)
    }

    /// Samples `B(x₀; δ)` and grids it.
    pub fn ball_grid(&self, fields: &[CompiledField], x0: &[f64], delta: &[f64], cfg: &FlowConfig) -> Result<OccupancyGrid> {
        OccupancyGrid::from_cloud(&self.sample(fields, x0, delta, cfg)?, &self.resolution)
    }
}

/// Least-squares `(slope, intercept)` of `ln y` against `ln x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 2 {
        return Err(Error::Precondition("a log-log fit needs at least two points".into()));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(Error::Numerical("log-log fit of non-positive data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("log-log fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, my - slope * mx))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeRow {
    pub delta: Vec<f64>,
    pub volume: f64,
    /// `|Λ_δ(x₀)|` with `K = 1`.
    pub lambda: f64,
    pub ratio: f64,
}

/// `|B(x₀;δ)|` against `|Λ_δ(x₀)|` over a list of radii.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeTable {
    pub rows: Vec<VolumeRow>,
    /// Fitted exponent of `|B|` against the geometric mean of `δ`.
    pub slope: f64,
    pub ratio_range: (f64, f64),
}

impl VolumeTable {
    pub fn to_csv(&self) -> String {
        let k = self.rows.first().map_or(0, |r| r.delta.len());
        let mut head: Vec<String> = (1..=k).map(|j| format!("delta_{j}")).collect();
        head.extend(["volume", "lambda", "ratio"].map(String::from));
        let mut out = head.join(",") + "\n";
        for r in &self.rows {
            let mut cols: Vec<String> = r.delta.iter().map(|&d| fmt9(d)).collect();
            cols.extend([fmt9(r.volume), fmt9(r.lambda), fmt9(r.ratio)]);
            out += &(cols.join(",") + "\n");
        }
        out
    }

    /// Two columns: `ln s` and `ln |B|`, with `s` the geometric mean of `δ`.
    pub fn loglog_text(&self) -> String {
        self.rows.iter().map(|r| format!("{} {}\n", fmt9(geometric_mean(&r.delta).ln()), fmt9(r.volume.ln()))).collect()
    }
}

fn geometric_mean(v: &[f64]) -> f64 {
    (v.iter().map(|x| x.ln()).sum::<f64>() / v.len() as f64).exp()
}

pub fn volume_vs_lambda(
    fields: &[CompiledField],
    tuples: &[WordTuple],
    x0: &[f64],
    deltas: &[Vec<f64>],
    vcfg: &VolumeConfig,
    cfg: &FlowConfig,
) -> Result<VolumeTable> {
    if deltas.is_empty() {
        return Err(Error::Precondition("empty radius list".into()));
    }
    let lambda = CompiledTuples::new(tuples);
    if lambda.is_empty() || tuples.iter().all(|t| !t.nonvanishing) {
        return Err(Error::Precondition("Hormander condition fails at the base point".into()));
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for delta in deltas {
        let volume = vcfg.ball_grid(fields, x0, delta, cfg)?.measure();
        let lam = lambda.norm(x0, delta);
        if !(lam > 0.0) {
            return Err(Error::Precondition("Hormander condition fails at the base point".into()));
        }
        rows.push(VolumeRow { delta: delta.clone(), volume, lambda: lam, ratio: volume / lam });
    }
    let slope = if rows.len() >= 2 {
        let xs: Vec<f64> = rows.iter().map(|r| geometric_mean(&r.delta)).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.volume).collect();
        fit_loglog(&xs, &ys)?.0
    } else {
        f64::NAN
    };
    let ratio_range = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.ratio), hi.max(r.ratio)));
    Ok(VolumeTable { rows, slope, ratio_range })
}

/// `|B(x₀;2δ)| / |B(x₀;δ)|`, both balls sampled with the same seed and gridded
/// with `vcfg.resolution`.
pub fn doubling_ratio(fields: &[CompiledField], x0: &[f64], delta: &[f64], vcfg: &VolumeConfig, cfg: &FlowConfig) -> Result<f64> {
    let small = vcfg.ball_grid(fields, x0, delta, cfg)?.measure();
    let doubled: Vec<f64> = delta.iter().map(|d| 2.0 * d).collect();
    let big = vcfg.ball_grid(fields, x0, &doubled, cfg)?.measure();
    Ok(big / small)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessRow {
    pub delta0: f64,
    pub delta: Vec<f64>,
    pub omega: f64,
    pub alpha: Vec<f64>,
    /// `α^b / |Ω|`.
    pub ratio: f64,
}

/// Ratios `α^b/|Ω|` for `Ω = B(x₀; δ₀^a)` along a list of `δ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessTable {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub rows: Vec<WitnessRow>,
}

impl WitnessTable {
    /// Rows sorted by decreasing `δ₀`.
    fn by_shrinking_delta0(&self) -> Vec<&WitnessRow> {
        let mut rows: Vec<&WitnessRow> = self.rows.iter().collect();
        rows.sort_by(|x, y| y.delta0.total_cmp(&x.delta0));
        rows
    }

    /// The ratio strictly increases as `δ₀` decreases.
    pub fn is_increasing(&self) -> bool {
        self.by_shrinking_delta0().windows(2).all(|w| w[1].ratio > w[0].ratio)
    }

    /// Ratio at the smallest `δ₀` over the ratio at the largest.
    pub fn cumulative_growth(&self) -> f64 {
        let rows = self.by_shrinking_delta0();
        match (rows.first(), rows.last()) {
            (Some(a), Some(b)) => b.ratio / a.ratio,
            _ => f64::NAN,
        }
    }

    /// Smallest ratio between consecutive rows as `δ₀` decreases.
    pub fn min_step_growth(&self) -> f64 {
        self.by_shrinking_delta0().windows(2).map(|w| w[1].ratio / w[0].ratio).fold(f64::INFINITY, f64::min)
    }

    /// Largest ratio over the ratio at the largest `δ₀`.
    pub fn max_over_first(&self) -> f64 {
        let rows = self.by_shrinking_delta0();
        let first = rows.first().map_or(f64::NAN, |r| r.ratio);
        rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max) / first
    }

    pub fn to_csv(&self) -> String {
        let k = self.a.len();
        let mut head = vec!["delta0".to_string()];
        head.extend((1..=k).map(|j| format!("delta_{j}")));
        head.push("omega".into());
        head.extend((1..=k).map(|j| format!("alpha_{j}")));
        head.push("ratio".into());
        let mut out = head.join(",") + "\n";
        for r in &self.rows {
            let mut cols = vec![fmt9(r.delta0)];
            cols.extend(r.delta.iter().map(|&d| fmt9(d)));
            cols.push(fmt9(r.omega));
            cols.extend(r.alpha.iter().map(|&a| fmt9(a)));
            cols.push(fmt9(r.ratio));
            out += &(cols.join(",") + "\n");
        }
        out
    }
}

fn to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// For each `δ₀`: `δ = (δ₀^{a_1},…,δ₀^{a_k})`, `Ω` the sampled `B(x₀;δ)`, and
/// the averages `α_j = |Ω|/|π_j(Ω)|` from grids matched at `x₀`.
#[allow(clippy::too_many_arguments)]
pub fn ratio_table(
    fields: &[CompiledField],
    maps: &[CompiledMap],
    x0: &[f64],
    a: &[f64],
    b: &[f64],
    delta0_list: &[f64],
    vcfg: &VolumeConfig,
    cfg: &FlowConfig,
) -> Result<WitnessTable> {
    let k = fields.len();
    if maps.len() != k {
        return Err(Error::ArityMismatch { expected: k, found: maps.len() });
    }
    if a.len() != k || b.len() != k {
        return Err(Error::ArityMismatch { expected: k, found: a.len().min(b.len()) });
    }
    if delta0_list.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(Error::Precondition("δ₀ values must lie in (0, 1)".into()));
    }
    let mut rows = Vec::with_capacity(delta0_list.len());
    for &d0 in delta0_list {
        let delta: Vec<f64> = a.iter().map(|&ai| d0.powf(ai)).collect();
        let omega = vcfg.ball_grid(fields, x0, &delta, cfg)?;
        let sample = SetSample::matched(omega, maps.to_vec(), x0);
        let alpha = super::grid::alphas(&sample)?;
        let measure = sample.omega.measure();
        let ratio = ratio_from_alphas(&alpha, b, measure);
        rows.push(WitnessRow { delta0: d0, delta, omega: measure, alpha, ratio });
    }
    Ok(WitnessTable { a: a.to_vec(), b: b.to_vec(), rows })
}

/// Blow-up demonstration for a `b ∉ P`: `a` separates `b` from `P`, so
/// `α^b/|Ω| ≳ δ₀^{a·b − 1}` grows without bound as `δ₀ → 0`.
#[allow(clippy::too_many_arguments)]
pub fn necessity_witness_for_b(
    fields: &[CompiledField],
    maps: &[CompiledMap],
    polytope: &NewtonPolytope,
    b: &[BigRational],
    delta0_list: &[f64],
    vcfg: &VolumeConfig,
    cfg: &FlowConfig,
) -> Result<(SeparatingFunctional, WitnessTable)> {
    let sep = match polytope.separating_functional(b) {
        Err(Error::NotSeparable) => return Err(Error::Precondition("b lies in the Newton polytope".into())),
        other => other?,
    };
    let x0 = vec![0.0; fields.first().map_or(0, |f| f.dim())];
    let table = ratio_table(fields, maps, &x0, &sep.as_f64(), &to_f64(b), delta0_list, vcfg, cfg)?;
    Ok((sep, table))
}

/// [`necessity_witness_for_b`] at `b(p)`; `p` must classify as not of
/// restricted weak type.
#[allow(clippy::too_many_arguments)]
pub fn necessity_witness(
    fields: &[CompiledField],
    maps: &[CompiledMap],
    polytope: &NewtonPolytope,
    p: &ExponentTuple,
    delta0_list: &[f64],
    vcfg: &VolumeConfig,
    cfg: &FlowConfig,
) -> Result<(SeparatingFunctional, WitnessTable)> {
    let c = classify(p, polytope)?;
    if c.verdict != Verdict::NotRestrictedWeakType || polytope.is_empty() {
        return Err(Error::Precondition(format!("p = {p} classifies as {}, not NOT_RESTRICTED_WEAK_TYPE", c.verdict)));
    }
    necessity_witness_for_b(fields, maps, polytope, &b_of_p(p)?, delta0_list, vcfg, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::{parse_polynomial, rat, PolyMap, PolyVectorField};

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

    fn small() -> VolumeConfig {
        VolumeConfig { samples: 40_000, ..Default::default() }
    }

    #[test]
    fn fmt9_has_nine_significant_digits() {
        assert_eq!(fmt9(0.04), "4.00000000e-2");
        assert_eq!(fmt9(1234.5678912), "1.23456789e3");
    }

    #[test]
    fn loglog_fit_recovers_power_law() {
        let xs = [0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(4)).collect();
        let (s, c) = fit_loglog(&xs, &ys).unwrap();
        assert!((s - 4.0).abs() < 1e-12 && (c - 3f64.ln()).abs() < 1e-12);
        assert!(fit_loglog(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog(&[1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn doubling_is_at_least_one() {
        let f = fields(2, &[&["1", "0"], &["1", "x1"]]);
        let r = doubling_ratio(&f, &[0.0, 0.0], &[0.1, 0.1], &small(), &FlowConfig::default()).unwrap();
        assert!(r >= 1.0);
        // homogeneous of degree 3 under (x1, x2) ↦ (λx1, λ²x2)
        assert!((r - 8.0).abs() < 0.4, "{r}");
    }

    #[test]
    fn witness_rejects_b_inside() {
        let f = fields(2, &[&["1", "0"], &["0", "1"]]);
        let m = maps(2, &[&["x2"], &["x1"]]);
        let p = NewtonPolytope::from_generators(2, vec![vec![1, 1]]).unwrap();
        let r = necessity_witness_for_b(&f, &m, &p, &[rat(2, 1), rat(2, 1)], &[0.125], &small(), &FlowConfig::default());
        assert!(matches!(r, Err(Error::Precondition(_))));
        let q: ExponentTuple = "3/2,3/2".parse().unwrap();
        assert!(necessity_witness(&f, &m, &p, &q, &[0.125], &small(), &FlowConfig::default()).is_err());
    }

    #[test]
    fn loomis_whitney_alphas_match_radii() {
        let f = fields(2, &[&["1", "0"], &["0", "1"]]);
        let m = maps(2, &[&["x2"], &["x1"]]);
        let t = ratio_table(&f, &m, &[0.0, 0.0], &[1.0, 1.0], &[1.0, 1.0], &[0.25], &small(), &FlowConfig::default()).unwrap();
        let row = &t.rows[0];
        // |π_1(B)| = 2δ_2, so α_1 = |B|/(2δ_2) = δ_1
        assert!((row.alpha[0] / 0.25 - 1.0).abs() < 0.06, "{row:?}");
        assert!((row.alpha[1] / 0.25 - 1.0).abs() < 0.06, "{row:?}");
        // α_1 α_2 / |B| ≈ 1/2 for b = (1, 1)
        assert!((row.ratio - 0.5).abs() < 0.05, "{row:?}");
        let csv = t.to_csv();
        assert!(csv.starts_with("delta0,delta_1,delta_2,omega,alpha_1,alpha_2,ratio\n"));
        assert_eq!(csv.lines().count(), 2);
    }
}
