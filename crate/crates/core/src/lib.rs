//! Period forcing for interval and star maps, and its shadow on the
//! Mandelbrot set.
//!
//! The crate is split into four engines:
//!
//! * [`orderings`]: the Sharkovsky order `>_2`, the star orders `>_k`,
//!   down-sets and tail decompositions.
//! * [`star`]: k-stars carrying a marked cycle (Štefan and spiral
//!   configurations), their Markov graphs, loop-derived period sets and an
//!   exact piecewise-linear oracle.
//! * [`vein`]: admissible periods and forcing along a `(k, l)`-vein,
//!   explicit chains, and the combinatorial sector surgeries.
//! * [`mandelbrot`]: superstable centers, real-axis ordering, wake angles,
//!   parameter rays and limb membership checks.
//!
//! [`cache`] holds the line-oriented center cache format.

pub mod cache;
pub mod error;
pub mod mandelbrot;
pub mod orderings;
pub mod star;
pub mod vein;

pub use error::{Error, Result};

pub use orderings::{KOrder, OrderKey, PeriodSet, Verdict};
pub use star::{CycleWitness, MarkovGraph, StarTreeMap};

pub use mandelbrot::{CenterRecord, CenterTags, RayTrace};
pub use vein::{ChainEntry, VeinSpec};
