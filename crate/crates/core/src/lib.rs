//! Photon-resolved Floquet theory: photon-number statistics of quantized drives
//! obtained from semiclassical, counting-field dressed propagators.

pub mod applications;
pub mod counting;
pub mod error;
pub mod floquet;
pub mod fock;
pub mod linalg;
pub mod semiclassical;
pub mod system;

pub use error::{PrftError, Result};
pub use linalg::{CMat, CVec};
pub use num_complex::Complex64;
pub use system::{CountingGrid, CouplingKind, DrivenSystem, MatterState, ModeSpec, PhotonMode, PhotonicInitialState};
