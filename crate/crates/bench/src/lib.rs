//! Benchmark fixtures shared by the criterion benches.

use steerlab_core::{CvState, IntegrationBox, TwoQubitState};

/// States exercised by every bench: TMSV, one-photon-subtracted and an LG mode.
pub fn fixture_states() -> Vec<CvState> {
    vec![
        CvState::tmsv(0.5).expect("valid"),
        CvState::photon_subtracted(0.3, 1).expect("valid"),
        CvState::laguerre_gauss(2, 3).expect("valid"),
    ]
}

pub fn small_box(state: &CvState, n: usize) -> IntegrationBox {
    IntegrationBox::new(state.default_half_width(), n).expect("odd n ≥ 33")
}

pub fn werner(p: f64) -> TwoQubitState {
    TwoQubitState::werner(p).expect("p in [0, 1]")
}
