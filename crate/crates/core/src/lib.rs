//! Circle diffeomorphism calculus and truncated Virasoro lowest-weight modules.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: band-limited real periodic functions (vector fields on the
//!   circle) stored by their Fourier coefficients, with Sobolev norms,
//!   products, mollification and quadrature bridges.
//! * [`diffeo`]: orientation-preserving circle diffeomorphisms as lifts
//!   `θ ↦ θ + p(θ)`, with composition, inversion, pushforward of vector
//!   fields, flows, the Schwarzian cocycle and the three-interval
//!   fragmentation.
//! * [`oracle`]: exact normal ordering of Virasoro words over `ℚ[c, h]`,
//!   used as the independent reference for every Gram matrix.
//! * [`virasoro`]: numerical truncations of lowest-weight modules, smeared
//!   stress-energy operators `T(f)` and the identities they satisfy on
//!   their exactness windows.
//! * [`checks`]: the batch of named property checks shared by the CLI suite
//!   and the acceptance tests.

pub mod checks;
pub mod diffeo;
pub mod error;
pub mod oracle;
pub mod partition;
pub mod spectral;
pub mod virasoro;

pub use diffeo::{CentralCharge, CircleDiffeo, FragmentationCover};
pub use error::{Error, Result};
pub use spectral::{QuadratureGrid, SpectralFunction};
pub use virasoro::{LowestWeight, ModuleTruncation, OperatorMatrix};

pub use num_complex::Complex64;
