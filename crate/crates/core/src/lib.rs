// SPDX-License-Identifier: MIT OR Apache-2.0

//! Narrowest-over-threshold detection of generalised change-points.

pub mod basis;
pub mod bench;
pub mod contrast;
pub mod detector;
pub mod error;
pub mod fitting;
pub mod metrics;
pub mod path;
pub mod sampler;
pub mod select;
pub mod simulate;
pub mod types;

pub use bench::{run_bench, BenchConfig};
pub use contrast::{Contrast, ContrastMax, ContrastProfile};
pub use detector::{not_detect, DetectionConfig, ScoredEnsemble, ScoredInterval};
pub use error::{Error, Result};
pub use fitting::{fit_segments, mad_sigma, SegmentFit};
pub use metrics::{hausdorff_scaled, mse, RunReport};
pub use path::{solution_path, SolutionPath};
pub use sampler::{deterministic_grid, draw_ensemble, IntervalEnsemble};
pub use select::{select_on_path, select_scenario, ssic_score, ScoredModel};
pub use simulate::{gen_noise, gen_signal, ModelId, NoiseKind, NoiseSpec, SignalSpec};
pub use types::{ChangePointSet, Interval, Scenario, TimeSeries};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/contrasts.md")]
    mod contrasts {}
    #[doc = include_str!("../../../book/src/detection.md")]
    mod detection {}
    #[doc = include_str!("../../../book/src/path.md")]
    mod path {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
