#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

//! Indicial roots of the self-dual deformation complex on cylinders R × Y³
//! over constant-curvature cross-sections, with independent numerical
//! checks of every formula used.

pub mod curvature;
pub mod fields;
pub mod indicial;
pub mod oracle;
pub mod spectra;

pub use num_complex::Complex64 as C64;
