//! Numerical geometry driven by polynomial flows.

mod ball;
mod chart;
mod geometry;
mod grid;
mod integrate;

pub use ball::{sample_ball, sample_box_ball, BallSpec, PointCloud};
pub use chart::{
    phi_chart, sample_parameters, verify_chart_lemmas, Chart, ChartData, ChartPoint, ChartReport, ChartTolerances,
};
pub use geometry::{
    doubling_ratio, fit_loglog, fmt9, necessity_witness, necessity_witness_for_b, ratio_table, volume_vs_lambda,
    VolumeConfig, VolumeRow, VolumeTable, WitnessRow, WitnessTable,
};
pub use grid::{
    alphas, ball_volume, matched_image_cells, project_measure, weak_type_ratio, OccupancyGrid, Resolution, SetSample,
};
pub use integrate::{flow, FlowConfig};
