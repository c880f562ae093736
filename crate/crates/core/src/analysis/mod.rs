//! Configuration, orchestration and output of analyses.

mod config;
mod export;
mod gallery;
mod report;

pub use config::{parse_config, AnalysisConfig, ConfigError, Numeric, Outputs, Toggles};
pub use export::{export_samples, export_to_string, linspace, ExportError, ExportKind};
pub use gallery::{gallery_config, GALLERY};
pub use report::{
    probe_spectrum, product_depth, q_samples, render_text, run_analysis, AnalysisReport, DecompositionFacts,
    DivisibilityFacts, Num, Numerics, OrthogonalityFacts, PccFacts, QFacts, RbcFacts, Section, SpectrumFacts,
    StageFacts, UdzFacts, VerdictFacts, SCHEMA_VERSION, SPECTRUM_LIMIT,
};
