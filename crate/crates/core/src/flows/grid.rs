use std::collections::BTreeSet;

use super::ball::PointCloud;
use crate::error::{Error, Result};
use crate::symalg::CompiledMap;

/// How cell sizes are chosen when gridding a cloud.
#[derive(Clone, Debug, PartialEq)]
pub enum Resolution {
    /// The same edge `h` on every axis.
    Uniform(f64),
    PerAxis(Vec<f64>),
    /// Axis `i` gets `extent_i / m`, where `extent_i` is the cloud's
    /// bounding-box width. Clouds related by an axis-wise linear scaling then
    /// get matched grids.
    Adaptive(u32),
}

impl Resolution {
    pub fn cell_sizes(&self, cloud: &PointCloud) -> Result<Vec<f64>> {
        let n = cloud.dim();
        let h = match self {
            Resolution::Uniform(h) => vec![*h; n],
            Resolution::PerAxis(h) => {
                if h.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: h.len() });
                }
                h.clone()
            }
            Resolution::Adaptive(m) => {
                if *m == 0 {
                    return Err(Error::Precondition("adaptive grid needs at least one cell per axis".into()));
                }
                if cloud.is_empty() {
                    return Err(Error::EmptyCloud);
                }
                cloud
                    .bounding_box()
                    .iter()
                    .map(|&(lo, hi)| {
                        let w = hi - lo;
                        // a flat axis still needs a positive cell
                        if w > 0.0 { w / *m as f64 } else { f64::MIN_POSITIVE.sqrt() }
                    })
                    .collect()
            }
        };
        if h.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Precondition("cell sizes must be positive and finite".into()));
        }
        Ok(h)
    }
}

/// Set of occupied axis-aligned cells `Π [c_i h_i, (c_i + 1) h_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    cell: Vec<f64>,
    occupied: BTreeSet<Vec<i64>>,
}

fn cell_index(x: &[f64], h: &[f64]) -> Vec<i64> {
    x.iter().zip(h).map(|(v, s)| (v / s).floor() as i64).collect()
}

impl OccupancyGrid {
    pub fn new(cell: Vec<f64>) -> Result<Self> {
        if cell.is_empty() || cell.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Precondition("cell sizes must be positive and finite".into()));
        }
        Ok(OccupancyGrid { cell, occupied: BTreeSet::new() })
    }

    pub fn from_cloud(cloud: &PointCloud, resolution: &Resolution) -> Result<Self> {
        let mut g = OccupancyGrid::new(resolution.cell_sizes(cloud)?)?;
        g.extend(cloud.points());
        Ok(g)
    }

    /// Marks the cells containing `points`.
    pub fn extend<'a>(&mut self, points: impl IntoIterator<Item = &'a [f64]>) {
        for p in points {
            debug_assert_eq!(p.len(), self.cell.len());
            self.occupied.insert(cell_index(p, &self.cell));
        }
    }

    pub fn insert(&mut self, p: &[f64]) -> Result<()> {
        if p.len() != self.cell.len() {
            return Err(Error::DimensionMismatch { expected: self.cell.len(), found: p.len() });
        }
        self.occupied.insert(cell_index(p, &self.cell));
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.cell.len()
    }

    pub fn cell_sizes(&self) -> &[f64] {
        &self.cell
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell.iter().product()
    }

    pub fn count(&self) -> usize {
        self.occupied.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occupied.is_empty()
    }

    pub fn contains_point(&self, p: &[f64]) -> bool {
        self.occupied.contains(&cell_index(p, &self.cell))
    }

    pub fn cells(&self) -> impl Iterator<Item = &[i64]> {
        self.occupied.iter().map(|c| c.as_slice())
    }

    pub fn cell_center(&self, idx: &[i64]) -> Vec<f64> {
        idx.iter().zip(&self.cell).map(|(&c, h)| (c as f64 + 0.5) * h).collect()
    }

    /// Occupied count times cell volume.
    pub fn measure(&self) -> f64 {
        self.count() as f64 * self.cell_volume()
    }

    /// Number of this grid's cells absent from `other` (grids must share
    /// cell sizes).
    pub fn cells_outside(&self, other: &OccupancyGrid) -> Result<usize> {
        if self.cell != other.cell {
            return Err(Error::Precondition("grids have different cell sizes".into()));
        }
        Ok(self.occupied.difference(&other.occupied).count())
    }
}

/// `|B|` as the occupied-cell count times `hⁿ`.
pub fn ball_volume(cloud: &PointCloud, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::Precondition(format!("cell size must be positive, got {h}")));
    }
    if cloud.is_empty() {
        return Err(Error::EmptyCloud);
    }
    Ok(OccupancyGrid::from_cloud(cloud, &Resolution::Uniform(h))?.measure())
}

/// Measure of `π(Ω)`: occupied cell centres of `grid` are mapped through `π`
/// and counted on an `(n−1)`-dimensional grid with cell sizes `image_cell`.
pub fn project_measure(grid: &OccupancyGrid, pi: &CompiledMap, image_cell: &[f64]) -> Result<f64> {
    if pi.source_dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: pi.source_dim() });
    }
    if image_cell.len() != pi.target_dim() {
        return Err(Error::DimensionMismatch { expected: pi.target_dim(), found: image_cell.len() });
    }
    let mut image = OccupancyGrid::new(image_cell.to_vec())?;
    let mut y = vec![0.0; pi.target_dim()];
    for c in grid.cells() {
        pi.eval_into(&grid.cell_center(c), &mut y);
        image.insert(&y)?;
    }
    Ok(image.measure())
}

/// Image cell sizes matched to `grid`: component `m` of `π` gets
/// `Σ_i |∂_i π_m(x₀)| h_i`, the extent of one source cell under `Dπ(x₀)`.
/// Rows vanishing at `x₀` fall back to the smallest source cell size.
pub fn matched_image_cells(grid: &OccupancyGrid, pi: &CompiledMap, x0: &[f64]) -> Vec<f64> {
    let hmin = grid.cell_sizes().iter().cloned().fold(f64::INFINITY, f64::min);
    pi.jacobian_at(x0)
        .iter()
        .map(|row| {
            let s: f64 = row.iter().zip(grid.cell_sizes()).map(|(d, h)| d.abs() * h).sum();
            if s > 0.0 { s } else { hmin }
        })
        .collect()
}

/// A sampled set `Ω` together with the maps `π_j` and the averages
/// `α_j = |Ω| / |π_j(Ω)|`.
#[derive(Clone, Debug)]
pub struct SetSample {
    pub omega: OccupancyGrid,
    pub maps: Vec<CompiledMap>,
    pub image_cells: Vec<Vec<f64>>,
}

impl SetSample {
    /// Uses image grids matched to `omega` at `x0`.
    pub fn matched(omega: OccupancyGrid, maps: Vec<CompiledMap>, x0: &[f64]) -> Self {
        let image_cells = maps.iter().map(|m| matched_image_cells(&omega, m, x0)).collect();
        SetSample { omega, maps, image_cells }
    }

    pub fn projections(&self) -> Result<Vec<f64>> {
        self.maps.iter().zip(&self.image_cells).map(|(m, h)| project_measure(&self.omega, m, h)).collect()
    }
}

/// `α_j = |Ω| / |π_j(Ω)|`.
pub fn alphas(s: &SetSample) -> Result<Vec<f64>> {
    if s.omega.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let omega = s.omega.measure();
    s.projections()?
        .into_iter()
        .enumerate()
        .map(|(j, m)| if m > 0.0 { Ok(omega / m) } else { Err(Error::ZeroProjection { index: j + 1 }) })
        .collect()
}

/// `Π α_j^{b_j} / |Ω|`.
pub fn weak_type_ratio(s: &SetSample, b: &[f64]) -> Result<f64> {
    if b.len() != s.maps.len() {
        return Err(Error::ArityMismatch { expected: s.maps.len(), found: b.len() });
    }
    let a = alphas(s)?;
    Ok(ratio_from_alphas(&a, b, s.omega.measure()))
}

pub(crate) fn ratio_from_alphas(alpha: &[f64], b: &[f64], omega: f64) -> f64 {
    // in logs to survive tiny δ
    let log: f64 = alpha.iter().zip(b).map(|(a, e)| e * a.ln()).sum::<f64>() - omega.ln();
    log.exp()
}
