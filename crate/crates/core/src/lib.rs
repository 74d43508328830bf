pub mod bessel;
pub mod coherence;
pub mod coupling;
pub mod differential;
pub mod error;
pub mod harmonics;
pub mod oracle;
pub mod par;
pub mod rotation;
pub mod sphere;
pub mod transform;
pub mod validation;
pub mod wavefield;
pub mod wigner;
