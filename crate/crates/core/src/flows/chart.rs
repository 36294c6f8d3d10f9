use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::ball::chunk_rng;
use super::integrate::{rk4_in_place, FlowConfig, Rk4Scratch};
use crate::error::{Error, Result};
use crate::symalg::CompiledField;
use crate::words::{Catalog, CompiledTuples, Word, WordTuple};

/// Finite-difference step for `DΦ`.
const FD_STEP: f64 = 1e-4;
/// Largest accepted condition number of `DΦ(t)`.
const MAX_CONDITION: f64 = 1e12;
/// RNG stream reserved for chart parameter sampling, far from the ball
/// sampler's chunk streams.
const CHART_STREAM: usize = 1 << 40;

/// The map `Φ(t) = exp(Σ_j K⁻¹(Kδ)^{deg w_j} t_j X_{w_j})(x₀)` for a fixed
/// spanning tuple of words.
#[derive(Clone, Debug)]
pub struct Chart {
    x0: Vec<f64>,
    delta: Vec<f64>,
    k_scale: f64,
    words: Vec<Word>,
    fields: Vec<CompiledField>,
    coeffs: Vec<f64>,
    cfg: FlowConfig,
}

impl Chart {
    pub fn new(catalog: &Catalog, x0: &[f64], delta: &[f64], k_scale: f64, words: &[Word], cfg: &FlowConfig) -> Result<Self> {
        let n = catalog.dim();
        let k = catalog.arity();
        if x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x0.len() });
        }
        if delta.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: delta.len() });
        }
        if words.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: words.len() });
        }
        if !(k_scale >= 1.0) || delta.iter().any(|&d| !(d > 0.0)) {
            return Err(Error::Precondition("chart needs K ≥ 1 and positive radii".into()));
        }
        cfg.validate()?;
        let scale: Vec<f64> = delta.iter().map(|d| d * k_scale).collect();
        let mut fields = Vec::with_capacity(n);
        let mut coeffs = Vec::with_capacity(n);
        for w in words {
            fields.push(catalog.word_field(w)?.compile());
            coeffs.push(w.degree(k)?.monomial(&scale) / k_scale);
        }
        Ok(Chart {
            x0: x0.to_vec(),
            delta: delta.to_vec(),
            k_scale,
            words: words.to_vec(),
            fields,
            coeffs,
            cfg: cfg.clone(),
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// `K⁻¹(Kδ)^{deg w_j}` for each chart word.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    fn field_sum(&self, t: &[f64], y: &[f64], out: &mut [f64], tmp: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for ((f, c), tj) in self.fields.iter().zip(&self.coeffs).zip(t) {
            if *tj == 0.0 {
                continue;
            }
            f.eval_into(y, tmp);
            for (o, v) in out.iter_mut().zip(tmp.iter()) {
                *o += c * tj * v;
            }
        }
    }

    pub fn phi(&self, t: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if t.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: t.len() });
        }
        let mut x = self.x0.clone();
        if t.iter().all(|&v| v == 0.0) {
            return Ok(x);
        }
        let mut s = Rk4Scratch::new(n);
        let tmp = std::cell::RefCell::new(vec![0.0; n]);
        rk4_in_place(|y, out| self.field_sum(t, y, out, &mut tmp.borrow_mut()), &mut x, 1.0, &self.cfg, &mut s)?;
        Ok(x)
    }

    /// `DΦ(t)` by central differences with one Richardson step; column `i` is
    /// `∂Φ/∂t_i`.
    pub fn jacobian(&self, t: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim();
        let mut jac = DMatrix::zeros(n, n);
        let mut tp = t.to_vec();
        let diff = |tp: &mut Vec<f64>, i: usize, h: f64| -> Result<Vec<f64>> {
            let orig = tp[i];
            tp[i] = orig + h;
            let plus = self.phi(tp)?;
            tp[i] = orig - h;
            let minus = self.phi(tp)?;
            tp[i] = orig;
            Ok(plus.iter().zip(&minus).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        for i in 0..n {
            let coarse = diff(&mut tp, i, FD_STEP)?;
            let fine = diff(&mut tp, i, FD_STEP / 2.0)?;
            for r in 0..n {
                jac[(r, i)] = (4.0 * fine[r] - coarse[r]) / 3.0;
            }
        }
        Ok(jac)
    }

    /// Right-hand sides `K⁻¹(Kδ)^{deg w}X_w(y)` for the chart words, as columns.
    fn scaled_fields_at(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for (j, (f, c)) in self.fields.iter().zip(&self.coeffs).enumerate() {
            let v = f.eval(y);
            for r in 0..n {
                m[(r, j)] = c * v[r];
            }
        }
        m
    }

    /// Everything measured at one chart parameter.
    pub fn sample_at(&self, t: &[f64]) -> Result<ChartPoint> {
        let phi = self.phi(t)?;
        let dphi = self.jacobian(t)?;
        let sv = dphi.clone().singular_values();
        let smax = sv.max();
        let smin = sv.min();
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularChart { t: t.to_vec(), condition });
        }
        let rhs = self.scaled_fields_at(&phi);
        let lu = dphi.clone().lu();
        let y = lu.solve(&rhs).ok_or_else(|| Error::SingularChart { t: t.to_vec(), condition })?;
        Ok(ChartPoint { t: t.to_vec(), phi, det_dphi: dphi.determinant(), y })
    }
}

/// `Φ(t)`, `det DΦ(t)` and the pulled-back fields `Y_{w_i}(t)` (columns of
/// `y`) at one parameter `t`.
#[derive(Clone, Debug)]
pub struct ChartPoint {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub det_dphi: f64,
    pub y: DMatrix<f64>,
}

impl ChartPoint {
    /// `max_i |Y_{w_i}(t) − e_i|` in the sup norm.
    pub fn deviation(&self) -> f64 {
        let n = self.y.nrows();
        (self.y.clone() - DMatrix::<f64>::identity(n, n)).amax()
    }

    pub fn det_y(&self) -> f64 {
        self.y.determinant()
    }

    pub fn t_norm(&self) -> f64 {
        DVector::from_column_slice(&self.t).norm()
    }
}

/// A chart together with samples of it on the ball `|t| ≤ radius`.
#[derive(Clone, Debug)]
pub struct ChartData {
    pub chart: Chart,
    pub selected: WordTuple,
    pub radius: f64,
    /// The first sample is always `t = 0`.
    pub points: Vec<ChartPoint>,
}

/// `count` parameters uniform in the Euclidean ball of `radius` in ℝⁿ,
/// led by the origin.
pub fn sample_parameters(n: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = chunk_rng(seed, CHART_STREAM);
    let mut out = vec![vec![0.0; n]];
    while out.len() < count.max(1) {
        let dir: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
        out.push(dir.iter().map(|v| v * r / norm).collect());
    }
    out
}

/// Builds the chart for `I_{x₀}` = `selected` and samples it at `samples`
/// parameters in the ball of `radius`.
pub fn phi_chart(
    catalog: &Catalog,
    x0: &[f64],
    delta: &[f64],
    k_scale: f64,
    selected: &WordTuple,
    radius: f64,
    samples: usize,
    cfg: &FlowConfig,
) -> Result<ChartData> {
    if !(radius > 0.0) {
        return Err(Error::Precondition("chart radius must be positive".into()));
    }
    let chart = Chart::new(catalog, x0, delta, k_scale, &selected.words, cfg)?;
    let params = sample_parameters(chart.dim(), radius, samples, cfg.seed);
    let points = params.par_iter().map(|t| chart.sample_at(t)).collect::<Result<Vec<_>>>()?;
    Ok(ChartData { chart, selected: selected.clone(), radius, points })
}

/// Pass thresholds for [`verify_chart_lemmas`].
#[derive(Clone, Debug, PartialEq)]
pub struct ChartTolerances {
    pub y_at_zero: f64,
    pub det_range: (f64, f64),
    pub lambda_ratio_max: f64,
    pub volume_ratio_range: (f64, f64),
}

impl Default for ChartTolerances {
    fn default() -> Self {
        ChartTolerances { y_at_zero: 1e-5, det_range: (0.5, 2.0), lambda_ratio_max: 4.0, volume_ratio_range: (0.5, 2.0) }
    }
}

/// Summary of the chart checks over the sampled parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartReport {
    pub k_scale: f64,
    pub samples: usize,
    /// `max_i |Y_{w_i}(0) − e_i|`.
    pub y_at_zero: f64,
    /// `max_t max_i |Y_{w_i}(t) − e_i|`.
    pub y_deviation: f64,
    /// Smallest `C` with deviation `≤ C|t|/K` over the samples.
    pub y_constant: f64,
    pub det_min: f64,
    pub det_max: f64,
    /// Range of `|Λ_{Kδ}(Φ(t))| / |(Kδ)^{deg I} λ_I(Φ(t))|`.
    pub lambda_ratio: (f64, f64),
    /// Range over boxes `E` of `|Φ(E)| / (K⁻ⁿ |Λ_{Kδ}(x₀)| |E|)`.
    pub volume_ratio: (f64, f64),
    pub y_at_zero_ok: bool,
    pub det_ok: bool,
    pub lambda_ok: bool,
    pub volume_ok: bool,
}

impl ChartReport {
    pub fn passed(&self) -> bool {
        self.y_at_zero_ok && self.det_ok && self.lambda_ok && self.volume_ok
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Checks the chart estimates: `Y_{w_i} = e_i + O(|t|/K)`, `|det Y| ∼ 1`,
/// `|Λ∘Φ| ∼ (Kδ)^{deg I}|λ_I∘Φ|`, and `|Φ(E)| ∼ K⁻ⁿ|Λ(x₀)||E|` on `boxes`
/// random boxes inside the sampled ball (Monte Carlo over `|det DΦ|`).
pub fn verify_chart_lemmas(
    data: &ChartData,
    tuples: &[WordTuple],
    boxes: usize,
    tol: &ChartTolerances,
) -> Result<ChartReport> {
    if data.points.is_empty() {
        return Err(Error::EmptyCloud);
    }
    if tuples.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let chart = &data.chart;
    let n = chart.dim();
    let k_scale = chart.k_scale;
    let scale: Vec<f64> = chart.delta.iter().map(|d| d * k_scale).collect();

    let y_at_zero = data.points[0].deviation();
    let y_deviation = data.points.iter().map(ChartPoint::deviation).fold(0.0, f64::max);
    let y_constant = data
        .points
        .iter()
        .filter(|p| p.t_norm() > 0.0)
        .map(|p| p.deviation() / (p.t_norm() / k_scale))
        .fold(0.0, f64::max);
    let (det_min, det_max) = range(data.points.iter().map(|p| p.det_y().abs()));

    let all = CompiledTuples::new(tuples);
    let sel = CompiledTuples::new(std::slice::from_ref(&data.selected));
    let lambda_ratio = range(data.points.iter().map(|p| all.norm(&p.phi, &scale) / sel.norm(&p.phi, &scale)));

    let lambda0 = all.norm(&chart.x0, &scale);
    let reference = lambda0 / k_scale.powi(n as i32);
    let volume_ratio = if boxes == 0 {
        (f64::NAN, f64::NAN)
    } else {
        let mut rng = chunk_rng(chart.cfg.seed, CHART_STREAM + 1);
        // boxes of side r/(2√n) centred in the inner half ball stay inside
        let side = data.radius / (2.0 * (n as f64).sqrt());
        let centres = sample_parameters(n, data.radius / 2.0, boxes + 1, rng.random());
        let per_box = 32;
        let mut ratios = Vec::with_capacity(boxes);
        for c in centres.iter().skip(1) {
            let pts: Vec<Vec<f64>> = (0..per_box)
                .map(|_| c.iter().map(|ci| ci + side * (rng.random::<f64>() - 0.5)).collect())
                .collect();
            let dets = pts.par_iter().map(|t| Ok(chart.jacobian(t)?.determinant().abs())).collect::<Result<Vec<f64>>>()?;
            let mean = dets.iter().sum::<f64>() / per_box as f64;
            ratios.push(mean / reference);
        }
        range(ratios.into_iter())
    };

    Ok(ChartReport {
        k_scale,
        samples: data.points.len(),
        y_at_zero,
        y_deviation,
        y_constant,
        det_min,
        det_max,
        lambda_ratio,
        volume_ratio,
        y_at_zero_ok: y_at_zero <= tol.y_at_zero,
        det_ok: det_min >= tol.det_range.0 && det_max <= tol.det_range.1,
        lambda_ok: lambda_ratio.0 >= 1.0 - 1e-9 && lambda_ratio.1 <= tol.lambda_ratio_max,
        volume_ok: boxes == 0 || (volume_ratio.0 >= tol.volume_ratio_range.0 && volume_ratio.1 <= tol.volume_ratio_range.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symalg::{parse_polynomial, PolyVectorField};
    use crate::words::{CatalogCaps, LambdaVector};
    use crate::BigRational;
    use num::Zero;

    fn catalog(n: usize, comps: &[&[&str]]) -> Catalog {
        let gens = comps
            .iter()
            .map(|c| PolyVectorField::new(c.iter().map(|s| parse_polynomial(s, n).unwrap()).collect()).unwrap())
            .collect();
        Catalog::new(gens, CatalogCaps::with_word_len(3)).unwrap()
    }

    fn selected(c: &Catalog, delta: &[f64], k: f64) -> (Vec<WordTuple>, WordTuple) {
        let origin = vec![BigRational::zero(); c.dim()];
        let tuples = c.enumerate_tuples(&origin).unwrap();
        let lv = LambdaVector::compute(&tuples, &vec![0.0; c.dim()], delta, k).unwrap();
        let sel = lv.selected().clone();
        (tuples, sel)
    }

    #[test]
    fn loomis_whitney_chart_is_linear() {
        let c = catalog(2, &[&["1", "0"], &["0", "1"]]);
        let (tuples, sel) = selected(&c, &[0.2, 0.1], 1.0);
        let x0 = [0.3, -0.1];
        let chart = Chart::new(&c, &x0, &[0.2, 0.1], 1.0, &sel.words, &FlowConfig::default()).unwrap();
        assert_eq!(chart.phi(&[0.0, 0.0]).unwrap(), x0.to_vec());
        let p = chart.phi(&[0.5, -0.25]).unwrap();
        assert!((p[0] - 0.4).abs() < 1e-14 && (p[1] + 0.125).abs() < 1e-14, "{p:?}");

        let data = phi_chart(&c, &x0, &[0.2, 0.1], 1.0, &sel, 1.0, 16, &FlowConfig::default()).unwrap();
        let r = verify_chart_lemmas(&data, &tuples, 3, &ChartTolerances::default()).unwrap();
        assert!(r.y_deviation < 1e-9, "{r:?}");
        assert!((r.det_min - 1.0).abs() < 1e-9 && (r.det_max - 1.0).abs() < 1e-9);
        assert!((r.lambda_ratio.0 - 1.0).abs() < 1e-12 && (r.lambda_ratio.1 - 1.0).abs() < 1e-12);
        assert!((r.volume_ratio.0 - 1.0).abs() < 1e-6 && (r.volume_ratio.1 - 1.0).abs() < 1e-6, "{r:?}");
        assert!(r.passed());
    }

    #[test]
    fn heisenberg_chart_deviation_shrinks_with_k() {
        let c = catalog(3, &[&["1", "0", "0"], &["0", "1", "x1"]]);
        let delta = [0.05, 0.05];
        let mut last = f64::INFINITY;
        for k in [4.0, 8.0, 16.0, 32.0] {
            let (tuples, sel) = selected(&c, &delta, k);
            let data = phi_chart(&c, &[0.0; 3], &delta, k, &sel, 1.0, 24, &FlowConfig::default()).unwrap();
            let r = verify_chart_lemmas(&data, &tuples, 2, &ChartTolerances::default()).unwrap();
            assert!(r.y_at_zero < 1e-5, "{r:?}");
            assert!(r.det_ok, "{r:?}");
            assert!(r.y_deviation < last, "K = {k}: {r:?}");
            // the pulled-back fields are e_i ± t/(2K) e_3
            assert!(r.y_constant < 0.5 + 1e-4, "{r:?}");
            last = r.y_deviation;
        }
    }

    #[test]
    fn parameter_samples_lie_in_the_ball() {
        let ps = sample_parameters(3, 0.5, 50, 9);
        assert_eq!(ps.len(), 50);
        assert!(ps[0].iter().all(|&v| v == 0.0));
        assert!(ps.iter().all(|p| p.iter().map(|v| v * v).sum::<f64>() <= 0.25 + 1e-12));
        assert_eq!(ps, sample_parameters(3, 0.5, 50, 9));
    }

    #[test]
    fn singular_chart_is_reported() {
        // X_1 and X_2 are parallel everywhere, so any chart is singular
        let c = catalog(2, &[&["1", "0"], &["2", "0"]]);
        let words = vec![Word::letter(1), Word::letter(2)];
        let chart = Chart::new(&c, &[0.0, 0.0], &[0.1, 0.1], 2.0, &words, &FlowConfig::default()).unwrap();
        assert!(matches!(chart.sample_at(&[0.1, 0.2]), Err(Error::SingularChart { .. })));
    }
}
