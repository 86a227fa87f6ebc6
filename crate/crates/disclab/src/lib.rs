//! Desk-scale laboratory for a gas of N hard discs in a circular reflecting
//! enclosure.
//!
//! The crate provides an exact event-driven collision engine plus the
//! analysis instruments built on top of it:
//!
//! - [`dynamics`]: collision prediction/resolution and the event loop,
//!   with a naive time-stepping reference in [`reference`];
//! - [`chaos`]: velocity-reversal echoes, perturbation amplification in a
//!   frozen-scatterer scene, missing-partner detection, mean-free-path and
//!   expansion measurements;
//! - [`semiclassics`]: Gaussian-packet edge-ray tracing, width/angle
//!   amplification, WKB validity checks, and the delocalization prediction;
//! - [`scattering`]: exact 2D hard-disc phase shifts via [`bessel`], partial
//!   wave cross-sections, and the semiclassical deflection correspondence;
//! - [`overlap`]: pointer-state overlap products and interference bounds;
//! - [`diffraction`]: static structure factor probe versus a smeared
//!   homogeneous reference.

pub mod bessel;
pub mod chaos;
pub mod config;
pub mod diffraction;
pub mod dynamics;
pub mod events;
pub mod overlap;
pub mod reference;
pub mod scattering;
pub mod scene;
pub mod semiclassics;
pub mod state;
pub mod vec2;

pub use config::{mean_free_path_nominal, parse_config, Region, SystemConfig};
pub use dynamics::{advance, reverse_velocities};
pub use state::{sample_initial_configuration, SystemState};
pub use vec2::Vec2;
