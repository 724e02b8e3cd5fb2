//! Time integration of the transformed random equations.

pub mod config;
pub mod experiment;
pub mod noise;
pub mod radius;
pub mod run;
pub mod scheme;

pub use config::SimConfig;
pub use experiment::{minimal_nu, run_global_experiment, theorem_alpha, GlobalExperiment};
pub use noise::NoiseModel;
pub use radius::{RadiusKind, RadiusSchedule};
pub use run::{
    recover_v, run, run_with_observer, run_with_path, step_damping, step_diffusion, RunRecord,
    Sample, Status,
};
pub use scheme::{Propagator, Scheme};
