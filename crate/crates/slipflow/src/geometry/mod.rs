//! Meshes, clipping, and windowed norms.

pub mod clip;
pub mod mesh;
pub mod norms;

pub use mesh::{
    build_channel_mesh, build_halfstrip_mesh, ChannelMesh, HalfStripMesh, Side, TriMesh,
};
pub use norms::{
    column_line_integral, horizontal_line_integral, integral_over, integral_over_slab,
    lateral_average, windowed_norm, Sampler, WindowNorm,
};
