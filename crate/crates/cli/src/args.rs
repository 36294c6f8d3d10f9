use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mlradon", version, about = "Bracket catalogs, Newton polytopes and ball estimates for multilinear Radon-like transforms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Problem selection and catalog options shared by every spec-driven command.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Problem file, or a bundled name: lw2, lw3, tao-wright, heisenberg.
    pub spec: String,
    /// Overrides the problem file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the problem file's ε for the per-letter cap ⌈d/ε⌉.
    #[arg(long)]
    pub eps: Option<String>,
    /// Overrides the problem file's maximum word length.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Also write the table as CSV to this path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

/// Ball sampling and gridding options.
#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 200_000)]
    pub samples: usize,
    /// Flow segments per sample; defaults to 3n.
    #[arg(long)]
    pub segments: Option<usize>,
    /// Cells per axis of the bounding box for the occupancy grid.
    #[arg(long, default_value_t = 48)]
    pub cells: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Word catalog with each word's degree and field.
    Brackets(SpecArgs),
    /// Hörmander span check at the origin.
    Hormander(SpecArgs),
    /// Newton polytope generators, vertices and serialization.
    Polytope(SpecArgs),
    /// Classifies an exponent tuple against the polytope.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated exponents, e.g. `3/2,3/2` or `2,inf`.
        #[arg(long)]
        p: String,
    },
    /// Samples B(0; δ) and estimates its volume.
    Ball {
        #[command(flatten)]
        spec: SpecArgs,
        /// Comma-separated radii, one per generator.
        #[arg(long)]
        delta: String,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long)]
        segments: Option<usize>,
        /// Uniform cell size; defaults to min δ / 32.
        #[arg(long)]
        h: Option<f64>,
    },
    /// |B(0; δ)| against |Λ_δ(0)| over a list of radii.
    VolumeScan {
        #[command(flatten)]
        spec: SpecArgs,
        /// Scalars `s` meaning δ = (s,…,s), or `;`-separated radius tuples.
        #[arg(long, default_value = "0.2,0.1,0.05,0.025")]
        delta_list: String,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// |B(0; 2δ)| / |B(0; δ)|.
    Doubling {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        delta: String,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// Checks of the exponential chart Φ at one or more K.
    Chart {
        #[command(flatten)]
        spec: SpecArgs,
        /// One value or a comma-separated list.
        #[arg(long = "K")]
        k_scale: Option<String>,
        #[arg(long, default_value = "0.05")]
        delta: String,
        /// Sampled chart parameters.
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Random boxes for the volume check.
        #[arg(long, default_value_t = 8)]
        boxes: usize,
    },
    /// Blow-up of α^b/|Ω| along δ = δ₀^a for b outside the polytope.
    Witness {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, conflicts_with = "b", required_unless_present = "b")]
        p: Option<String>,
        /// Uses this b directly instead of b(p).
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value = "1/8,1/16,1/32,1/64")]
        delta0_list: String,
        #[command(flatten)]
        sampling: SampleArgs,
    },
    /// Runs the bundled acceptance suite.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}
