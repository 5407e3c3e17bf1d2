//! Shared fixtures for the benchmarks in `benches/`.

use aperture_forge_core::geometry::make_scaled_mra;

/// Scaled minimum-redundancy placement on the ULA aperture `(M−1)/2`.
pub fn mra_fixture(port_count: usize) -> Vec<f64> {
    let aperture = (port_count as f64 - 1.0) / 2.0;
    make_scaled_mra(port_count, aperture)
        .expect("fixture port counts have table entries")
        .into_positions()
}
