//! Exact, checkable machinery for aperiodic two-dimensional configurations:
//! periodicity defects in finite patterns, the coin-and-bucket game,
//! hulls of sparse diamond families and the safe paths around them, leveled
//! witness certificates, and gluing of two certified configurations.

pub mod certificate;
pub mod game;
pub mod geometry;
pub mod gluing;
pub mod patterns;
pub mod rational;
