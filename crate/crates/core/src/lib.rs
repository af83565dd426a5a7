//! Adaptive directional subdivision with the shearlet dilations
//!
//! ```text
//!   W0 = | 4  0 |      W1 = | 4 -4 |
//!        | 0  2 |           | 0  2 |
//! ```
//!
//! Every step refines data either along the axes (`W0`) or along a sheared
//! direction (`W1`); a 0/1 word picks the branch. The crate provides exact
//! dyadic arithmetic for masks and data, the ideal reduction that yields
//! difference schemes, an upper/lower bracket on the restricted joint
//! spectral radius that decides convergence, and the interpolatory fast
//! shearlet decomposition with exact reconstruction.
//!
//! ```
//! use shearsub::{masks, subdivision, Dyadic, EpsWord, SampledField};
//!
//! let pair = masks::dd_pair();
//! let word: EpsWord = "01".parse().unwrap();
//! let refined = subdivision::run(&pair, &word, &SampledField::<Dyadic>::delta(0)).unwrap();
//! assert_eq!(refined.get((0, 0)), Dyadic::ONE);
//! ```

pub mod convergence;
pub mod error;
pub mod fsd;
pub mod io;
pub mod lattice;
pub mod masks;
pub mod subdivision;
pub mod symbol;

pub use error::{Error, Result};
pub use lattice::EpsWord;
pub use masks::MaskPair;
pub use subdivision::{Boundary, SampledField};
pub use symbol::{Dyadic, LaurentPoly, MatrixMask, Scalar};

/// Chapters of the guide in `book/`, compiled so their examples run as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/lattice.md")]
    mod lattice {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/masks.md")]
    mod masks {}
    #[doc = include_str!("../../../book/src/subdivision.md")]
    mod subdivision {}
    #[doc = include_str!("../../../book/src/convergence.md")]
    mod convergence {}
    #[doc = include_str!("../../../book/src/decomposition.md")]
    mod decomposition {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
