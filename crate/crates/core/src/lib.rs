//! Rational points of bounded anticanonical height on the quartic del Pezzo
//! surface of type A₃+A₁
//!
//! ```text
//!     x0·x3 − x2·x4 = x0·x1 + x1·x3 + x2² = 0      in P⁴
//! ```
//!
//! over a handful of class-number-one, norm-Euclidean quadratic fields (and ℚ).
//!
//! The crate counts points of bounded height on the complement `U` of the lines
//! in two independent ways — a brute-force projective scan ([`direct`]) and an
//! enumeration of integral points on the universal torsor ([`torsor`]) — and
//! computes the ingredients of the predicted leading constant ([`constant`]).
//! All branch decisions in the counting code are exact: elements of the ring of
//! integers are pairs of `i128` coordinates and every comparison of embedded
//! quantities is reduced to the sign of an integer expression.

pub mod constant;
pub mod direct;
pub mod error;
pub mod geometry;
pub mod numberfield;
pub mod rational;
pub mod torsor;

pub use error::{Error, Result};
pub use rational::Rational;
