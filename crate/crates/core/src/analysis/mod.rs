//! Error measurement, theorem bounds, energy budgets, Grönwall envelopes and
//! rate fitting.

mod bounds;
mod budget;
mod error;
pub mod fit;
mod gronwall;
mod reference;

pub use bounds::{calibrate_c_fit, theorem_bounds};
pub use budget::{
    budget_subterms, correctors_from_euler, energy_budget, energy_budget_series, three_point_rate, BudgetRow,
    BudgetSubterms, BudgetTerms, EnergyBudget, BUDGET_HEADER,
};
pub use error::{error_series, state_distance_sq, ErrorSeries};
pub use fit::{fit_rate, linear_fit, observed_orders, RateFit};
pub use gronwall::gronwall_envelope;
pub use reference::shear_reference;
