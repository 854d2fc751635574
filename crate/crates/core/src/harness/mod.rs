//! Configuration-driven experiments: coefficient geometries, sweeps, and CSV output.

mod coefficient;
mod config;
mod experiments;

pub use coefficient::{preset_geometry, CoefficientSpec};
pub use config::{
    BaseKind, CoefficientConfig, ConvergenceConfig, ExperimentConfig, ManufacturedSolution, MeshConfig, OneOrMany,
    OutputConfig, PartitionConfig, Rect, Scheme, SolverConfig, SweepConfig,
};
pub use experiments::{
    cp_options, mesh_info, run_convergence_study, run_iteration_table, run_matrix_diagnostics, run_scaling_table,
    run_spectrum_dump, scaling_pairs, solve_preconditioned, write_csv, write_spectrum, ConvergenceRow, CsvRow,
    Diagnostics, IterationRow, NonsymmetryRow, PerturbationRow, Problem, ScalingRow, SolveOutcome, SpectrumDump,
};
