//! The i.i.d. environment `{ω_x}` and the lattice it lives on.

mod field;
pub mod rng;
mod site;

pub use field::{generate_field, shift_view, SiteWeights, WeightField, WeightSampler, WeightSpec};
pub use site::{Grid, Site, Window, E1, E2, ORIGIN};
