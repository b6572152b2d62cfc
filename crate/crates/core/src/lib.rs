//! Construction and exact evaluation of Doppler-resilient complementary
//! sequence (DRCS) sets.
//!
//! The pipeline is:
//!
//! 1. build a generalized quasi-Florentine rectangle ([`rectangle`]),
//!    possibly from finite-field machinery ([`field`]);
//! 2. pick a Butson-type Hadamard matrix ([`hadamard`]);
//! 3. assemble the DRCS set ([`drcs`]);
//! 4. evaluate its aperiodic ambiguity function over a delay-Doppler zone
//!    ([`ambiguity`]) and compare the peak against the aperiodic lower bound
//!    ([`bounds`]).
//!
//! [`oracles`] holds slow, definition-literal reference implementations used
//! by the test suites and by the CLI's `--paranoid` mode.

pub mod ambiguity;
pub mod bounds;
pub mod drcs;
pub mod field;
pub mod hadamard;
pub mod oracles;
pub mod provenance;
pub mod rectangle;

mod arith;

pub use ambiguity::{AfGrid, AfMethod, ThetaReport};
pub use bounds::{BoundReport, LowerBound};
pub use drcs::{DrcsSet, Zone};
pub use field::{FieldElem, FieldSpec, GaloisField};
pub use hadamard::PhaseMatrix;
pub use provenance::Provenance;
pub use rectangle::{Family, Rectangle, RectangleClass};
