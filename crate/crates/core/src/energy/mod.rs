//! Biaxial Oseen-Frank energies.

mod blowup;
mod constants;
mod density;
mod total;

pub use blowup::{blowup_form, ellipticity_margin, Ellipticity, QuadraticForm};
pub use constants::FrankConstants;
pub use density::{density_terms, frank_density, modified_density, DensityTerms};
pub use total::{
    discrete_energy, discrete_gradient, modified_energy, stabilization, total_energy, variational_gradient,
    EnergyBreakdown,
};
