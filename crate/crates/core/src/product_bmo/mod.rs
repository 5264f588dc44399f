//! Product BMO on the plane: the wavelet profile, dyadic rectangles, lifts to the
//! upper half spaces and the Carleson-type functionals built from them.

pub mod dyadic;
pub mod functionals;
pub mod lemma;
pub mod lift;
pub mod wavelet;

pub use dyadic::{enumerate_dyadic_rectangles, DyadicInterval, DyadicRectangle, OpenSetMask};
pub use functionals::{
    apply_symbol, carleson_lifts, conjecture_functional, product_bmo_b, product_bmo_c, square_functional_from_lifts,
    square_functional, symbol_sup_functional, CarlesonLifts, ProductConfig, Symbol,
};
pub use lemma::{lemma_scale_identity, lemma_table, LemmaReport, LemmaTable};
pub use lift::{convolve_psi_y, psi_y_kernel, s_function, s_r_squared, LiftFamily};
pub use wavelet::{build_psi, WaveletProfile};
