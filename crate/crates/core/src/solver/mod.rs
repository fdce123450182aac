//! Time integration of the channel flow and the exact shear-flow oracle.

mod banded;
mod euler;
mod ns;
mod presets;
mod shear_exact;
mod simulation;
mod spectral;
mod state;
mod trajectory;

pub use euler::{euler_step, EulerSolver};
pub use ns::{ns_step, NsSolver};
pub use presets::{InitialData, ShearProfile};
pub use shear_exact::{shear_exact, ShearExact, TopBoundary};
pub use simulation::{initial_state, run_simulation, PairedRun, SimulationConfig, EULER_SCHEME, NS_SCHEME};
pub use spectral::CFL_NUMBER;
pub use state::FlowState;
pub use trajectory::{StepRecord, Trajectory, TrajectoryManifest};
