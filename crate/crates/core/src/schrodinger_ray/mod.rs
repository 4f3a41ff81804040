//! The half-sided modular inclusion on the light ray in its Schrödinger model.
//!
//! Packets are real functions of the light-ray coordinate; the half-line
//! subspace `H_λ` consists of packets supported in `[λ, ∞)`.

mod cross_check;
mod entropy;
mod packet;
mod spectral;

pub use cross_check::{default_family, discretized_cross_check, CrossCheckReport};
pub use entropy::{
    convexity_check, entropy_at, entropy_derivative_at, entropy_profile,
    entropy_second_derivative_at, modular_generator_form, ConvexityViolation, EntropyProfile,
};
pub use packet::{NamedPacket, PacketSpec, WavePacket};
pub use spectral::{
    fourier_transform, high_momentum_tail, modular_flow, position_symplectic_form,
    spectral_embed, symplectic_form, translation_generator_check, GeneratorReport, RelationCheck,
    SpectralGrid, SpectralSamples,
};
