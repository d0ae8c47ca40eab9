//! Inverse-design dynamic mode decomposition.
//!
//! Fits a linear-in-parameter operator family to multi-experiment snapshot
//! data, predicts trajectories at unseen design parameters, and solves
//! constrained inverse-design problems with bagged uncertainty estimates.
//! Built-in ODE/PDE simulators generate training data and act as
//! verification oracles.

pub mod design;
pub mod error;
pub mod fit;
pub mod linalg;
pub mod modal;
pub mod model_io;
pub mod observables;
pub mod oracles;
pub mod predict;
pub mod snapshots;
pub mod uq;

pub use design::{evaluate_loss, solve_design, DesignProblem, DesignResult, LossSpec};
pub use error::{Error, Result};
pub use fit::{fit_model, FitConfig, IdDmdModel};
pub use modal::{classify_modes, modal_decomposition, ModeMethod};
pub use model_io::{load_model, save_model};
pub use observables::ObservableConfig;
pub use predict::{reconstruct_trajectory, relative_error, Trajectory};
pub use snapshots::{load_snapshot_set, save_snapshot_set, ScalingFactors, SnapshotSet};
pub use uq::{bagged_ensemble, ensemble_statistics, BagConfig};
