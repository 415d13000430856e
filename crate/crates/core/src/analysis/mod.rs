//! Error analysis: moduli of continuity, the quantitative error bound,
//! Lipschitz-rate fitting and the auxiliary inequalities behind them.

mod bounds;
mod korovkin;
mod modulus;
mod rate;

pub use bounds::{
    e0_bound, gamma_threshold, tail_mass_bound_check, teoultimo_bound, teoultimo_rhs, warp_shift_check,
    TailMassCheck, WarpShift, MODULUS_INFLATION,
};
pub use korovkin::korovkin_witness;
pub use modulus::{
    modulus, modulus_pairwise, modulus_subadditivity_check, stencil_directions, ModulusEstimate,
    ModulusMethod, ModulusSource, SUBADDITIVITY_TOLERANCE,
};
pub use rate::{
    convergence_sweep, fit_rate, rate_guarantee_holds, ConvergenceRecord, ConvergenceReport, RateFit,
    DOMINANCE_MIN_N, MIN_FIT_RECORDS, RATE_SLACK, ROUNDOFF_FLOOR,
};
