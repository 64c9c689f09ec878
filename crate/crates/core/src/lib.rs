//! Oblivious mobile robots in the plane under semi-synchronous scheduling.
//!
//! The crate models robots that repeatedly look at the multiset of robot
//! locations (strong multiplicity), compute a destination in a local frame
//! chosen by an adversarial demon, and move there. On top of the model sits
//! the universal gathering protocol ([`gather2d`]) and a harness
//! ([`verify`]) that checks its correctness properties over seeded,
//! adversarially scheduled executions.
//!
//! All geometry is generic over [`Scalar`]: exact rationals or tolerance-aware
//! binary64 floats.

pub mod error;
pub mod frames;
pub mod gather2d;
pub mod geometry;
pub mod model;
pub mod render;
pub mod scalar;
pub mod scenario;
pub mod trace_io;
pub mod verify;

pub use error::{Error, Result};
pub use frames::Similarity;
pub use gather2d::{GatherR2, Measure, Phase};
pub use geometry::{Circle, Point, TriangleClass};
pub use model::{Configuration, DemonicAction, FrameParams, RobotId, Spectrum, Trace};
pub use scalar::{Backend, Rational, Scalar, Tolerance};
