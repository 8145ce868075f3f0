//! Support code for the `curvspec` binary.

pub mod artifact;
