//! Space-time densities of freely evolved operators and their norms.

mod compare;
mod families;
mod fit;
mod highdim;
mod spacetime;

pub use compare::{compare_densities, density_norm};
pub use families::{
    cosine_family, dirichlet_closed_form, family_by_name, random_orthonormal_system, CosineFamily,
    DiagonalFamily, OperatorFamily, RandomHsFamily, SchattenNormalisedFamily, TraceNormalisedFamily,
};
pub use fit::{scaling_fit, scaling_fit_skipping, ScalingFit};
pub use highdim::{
    cos2_moment, default_p_star, highdim_necessity, highdim_sweep, ConstraintRow, HighDimRecord,
    HighDimSweep,
};
pub use spacetime::{
    Quadrature, SpaceTimeDensity, DEFAULT_L4_BUDGET, REFINE_MAX_LEVELS, REFINE_TOLERANCE,
};

use crate::error::Result;
use crate::operators::DensityOperator;

/// Shorthand for [`SpaceTimeDensity::from_operator`].
pub fn spacetime_density(gamma: &DensityOperator, window: usize, renormalise: bool) -> Result<SpaceTimeDensity> {
    SpaceTimeDensity::from_operator(gamma, window, renormalise)
}
