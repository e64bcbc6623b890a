//! Orthonormal divergence-free wavelet bases on the periodic unit cube.
//!
//! A scalar Meyer multiresolution analysis is lifted to vector fields by the
//! helical pull-up `f -> sum_k f^(k) h(k, s) exp(2 pi i k.x)`, which maps
//! zero-mean scalars unitarily onto the positive-helicity, negative-helicity or
//! dilatational subspace. Together with the three uniform (harmonic) modes these
//! subspaces give the orthogonal split `L2 = S+ (+) S- (+) D (+) H`.

pub mod coherence;
pub mod error;
pub mod fourier;
pub mod generate;
pub mod helical;
pub mod helical_wavelet;
pub mod hodge;
pub mod io;
pub mod meyer;
pub mod verify;

pub use error::{Error, Result};
