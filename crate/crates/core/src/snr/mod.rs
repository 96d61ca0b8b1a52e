//! Worst-case sum-SNR analysis: the loss functions, their bounds, the
//! optimal slope set and the robust design rule.

pub mod closed_form;
pub mod direct;
pub mod slopes;
pub mod sum_snr;

pub use closed_form::{
    f1, f2, in_optimal_set, in_pole_set, interval_bound, j_closed, loss, loss_bounds, loss_omega,
    loss_to_db, worst_case_y, LossInput, POLE_TOLERANCE,
};
pub use direct::{affine_weights, grid_error_bound, j_direct, j_weighted, phasor_minimum, YGrid};
pub use slopes::{
    check_optimality, design_rule_alpha_star, design_rule_indices, is_optimal_slope,
    max_loss_over_shift, most_robust_slopes, optimal_slope_set, slope_for_index, PhaseSlopeConfig,
};
pub use sum_snr::{
    sum_snr_combined, sum_snr_omega, sum_snr_phi, sum_snr_pl, AntennaPair, Evaluation, FitKind,
    FitOptions, PacketTerms, SumSnr, YSearch,
};
