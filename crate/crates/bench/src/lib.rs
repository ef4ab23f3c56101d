//! Shared inputs for the criterion benches.

use lamina_core::MapParams;
use num_complex::Complex64;

/// The altered Type 2 figure map: n = 3, a = 0.0539 - 0.0118i, b = 0.01 + 0.03i.
pub fn type2_params() -> MapParams {
    MapParams::new(
        3,
        Complex64::new(0.0539, -0.0118),
        Complex64::new(0.01, 0.03),
    )
    .expect("valid parameters")
}
