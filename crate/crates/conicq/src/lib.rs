//! Constant Q-curvature conic 4-spheres.

pub mod adams;
pub mod cli;
pub mod geometry;
pub mod ode;
pub mod polyexp;
pub mod shooting;
