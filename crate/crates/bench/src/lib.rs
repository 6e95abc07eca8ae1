//! Shared fixtures for the benchmarks in `benches/`.

use npk_core::{reduced_model_for, MaterialParams, ReducedModel, StrainProfile, Texture};

pub fn unit_params() -> MaterialParams {
    MaterialParams::new(1.0, 2.0, 2.0, 1.0).expect("valid parameters")
}

pub fn profile(texture: Texture, h: f64) -> StrainProfile {
    StrainProfile::new(texture, unit_params(), h).expect("valid profile")
}

pub fn model(texture: Texture) -> ReducedModel {
    reduced_model_for(&profile(texture, 1e-2)).expect("reduction")
}
