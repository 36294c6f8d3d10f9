use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use super::integrate::{flow_field_in_place, FlowConfig, Rk4Scratch};
use crate::error::{Error, Result};
use crate::symalg::CompiledField;

/// Samples per RNG stream. Stream `i` covers samples `i*CHUNK..(i+1)*CHUNK`,
/// so output does not depend on the number of worker threads.
pub(crate) const CHUNK: usize = 1024;

pub(crate) fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Parameters of a sampled Carnot–Carathéodory ball `B(x₀; δ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSpec {
    pub x0: Vec<f64>,
    pub delta: Vec<f64>,
    /// Flow segments per sample.
    pub segments: usize,
    pub samples: usize,
}

impl BallSpec {
    /// Defaults: `3n` segments and `2·10⁵` samples.
    pub fn new(x0: Vec<f64>, delta: Vec<f64>) -> Self {
        let segments = 3 * x0.len();
        BallSpec { x0, delta, segments, samples: 200_000 }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_segments(mut self, segments: usize) -> Self {
        self.segments = segments;
        self
    }

    pub fn validate(&self, k: usize, n: usize) -> Result<()> {
        if self.delta.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: self.delta.len() });
        }
        if self.x0.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: self.x0.len() });
        }
        if self.delta.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(Error::Precondition("radii must be positive and finite".into()));
        }
        if self.samples == 0 {
            return Err(Error::Precondition("sample count must be positive".into()));
        }
        Ok(())
    }

    /// Largest `ε` with `δ_i ≤ δ_j^ε` for all `i, j`; `None` unless every
    /// radius lies in `(0, 1)`.
    pub fn nondegeneracy_exponent(&self) -> Option<f64> {
        if self.delta.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
            return None;
        }
        let mut eps = f64::INFINITY;
        for &di in &self.delta {
            for &dj in &self.delta {
                eps = eps.min(di.ln() / dj.ln());
            }
        }
        Some(eps)
    }

    pub fn satisfies_nondegeneracy(&self, eps: f64) -> bool {
        self.nondegeneracy_exponent().is_some_and(|e| e >= eps)
    }
}

/// Sampled points in ℝⁿ, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch { expected: dim, found: coords.len() });
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numerical("non-finite coordinate in point cloud".into()));
        }
        Ok(PointCloud { dim, coords })
    }

    pub fn from_points(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        PointCloud::new(dim, points.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Per-axis `(min, max)`.
    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        let mut bb = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.points() {
            for (b, &v) in bb.iter_mut().zip(p) {
                b.0 = b.0.min(v);
                b.1 = b.1.max(v);
            }
        }
        bb
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for p in self.points() {
            for (a, v) in m.iter_mut().zip(p) {
                *a += v;
            }
        }
        let len = self.len().max(1) as f64;
        m.iter_mut().for_each(|a| *a /= len);
        m
    }
}

fn check_fields(fields: &[CompiledField], n: usize) -> Result<()> {
    if fields.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    if let Some(bad) = fields.iter().find(|f| f.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: bad.dim() });
    }
    Ok(())
}

fn run_chunks<F>(samples: usize, dim: usize, per_chunk: F) -> Result<Vec<f64>>
where
    F: Fn(usize, usize, &mut Vec<f64>) -> Result<()> + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(samples - c * CHUNK);
            let mut out = Vec::with_capacity(count * dim);
            per_chunk(c, count, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(parts.concat())
}

/// Random compositions `e^{t_N δ_{j_N} X_{j_N}} ⋯ e^{t_1 δ_{j_1} X_{j_1}}(x₀)`
/// with uniform letters, `(|t_1|,…,|t_N|)` uniform on `{Σ|t_i| ≤ 1}` (a flat
/// Dirichlet draw with one slack coordinate) and uniform signs.
pub fn sample_ball(fields: &[CompiledField], spec: &BallSpec, cfg: &FlowConfig) -> Result<PointCloud> {
    let n = spec.x0.len();
    check_fields(fields, n)?;
    spec.validate(fields.len(), n)?;
    cfg.validate()?;
    let k = fields.len();
    let segs = spec.segments;
    let coords = run_chunks(spec.samples, n, |c, count, out| {
        let mut rng = chunk_rng(cfg.seed, c);
        let mut scratch = Rk4Scratch::new(n);
        let mut weights = vec![0.0; segs + 1];
        let mut x = vec![0.0; n];
        for _ in 0..count {
            x.copy_from_slice(&spec.x0);
            if segs > 0 {
                for w in weights.iter_mut() {
                    *w = rng.sample::<f64, _>(Exp1);
                }
                let total: f64 = weights.iter().sum();
                for i in 0..segs {
                    let j = rng.random_range(0..k);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    let t = sign * weights[i] / total * spec.delta[j];
                    flow_field_in_place(&fields[j], &mut x, t, cfg, &mut scratch)?;
                }
            }
            out.extend_from_slice(&x);
        }
        Ok(())
    })?;
    PointCloud::new(n, coords)
}

/// Samples of `B_𝐣(x₀; δ)`: `e^{t_n δ_{j_n} X_{j_n}} ⋯ e^{t_1 δ_{j_1} X_{j_1}}(x₀)`
/// with `t` uniform in `[−1, 1]ⁿ`. `sequence` holds 1-based letters.
pub fn sample_box_ball(
    fields: &[CompiledField],
    x0: &[f64],
    delta: &[f64],
    sequence: &[usize],
    samples: usize,
    cfg: &FlowConfig,
) -> Result<PointCloud> {
    let n = x0.len();
    check_fields(fields, n)?;
    BallSpec { x0: x0.to_vec(), delta: delta.to_vec(), segments: sequence.len(), samples }.validate(fields.len(), n)?;
    cfg.validate()?;
    if sequence.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: sequence.len() });
    }
    if let Some(&bad) = sequence.iter().find(|&&j| j == 0 || j > fields.len()) {
        return Err(Error::LetterOutOfRange { letter: bad, k: fields.len() });
    }
    let coords = run_chunks(samples, n, |c, count, out| {
        let mut rng = chunk_rng(cfg.seed, c);
        let mut scratch = Rk4Scratch::new(n);
        let mut x = vec![0.0; n];
        for _ in 0..count {
            x.copy_from_slice(x0);
            for &j in sequence {
                let t: f64 = rng.random_range(-1.0..=1.0);
                flow_field_in_place(&fields[j - 1], &mut x, t * delta[j - 1], cfg, &mut scratch)?;
            }
            out.extend_from_slice(&x);
        }
        Ok(())
    })?;
    PointCloud::new(n, coords)
}
