//! Special functions, quadrature and the closed-form constants.

pub mod constants;
pub mod gamma;
pub mod quad;

pub use constants::{
    cross_check_tolerance, fgb_charfn, goldman_constant, goldman_report, kappa_tau_closed, kappa_tau_closed_value,
    kappa_tau_quadrature, kappa_xi_brownian, kappa_xi_closed, kappa_xi_report, oscillating_integral,
    oscillating_integral_closed, oscillating_integral_numeric, stable_pdf, stable_pdf_origin, theorem_a_constant,
    theorem_a_constant_statistical, ConstantReport, Validity,
};
pub use gamma::{gamma_fn, sin_pi};
