//! Viscous channel flow over rough walls.
//!
//! This crate simulates stationary Stokes and Navier–Stokes flow through a
//! channel whose walls carry small-scale random roughness, extracts the
//! effective Navier slip lengths from boundary-layer cell problems, and runs
//! sweep studies that measure how well flat-wall models (no-slip and Navier
//! slip) approximate the resolved rough-wall flow as the roughness scale
//! shrinks.
//!
//! Module map:
//! * [`roughness`] — closed-form stationary random wall profiles.
//! * [`geometry`] — boundary-fitted periodic meshes and windowed norms.
//! * [`fem`] — mixed finite-element kernels (quadrature, basis, assembly,
//!   sparse direct solve).
//! * [`stokes`] — channel solves with prescribed flux: Stokes and Picard
//!   iteration for the nonlinear problem.
//! * [`boundary_layer`] — half-strip cell problems and slip-length
//!   extraction.
//! * [`potential`] — explicit half-plane kernel used as an independent
//!   cross-check of the cell solver.
//! * [`walllaw`] — closed-form model fields and the corrector expansion.
//! * [`harness`] — sweep orchestration, error norms, rate fits, persistence.
//! * [`cli`] — command-line front end.

pub mod boundary_layer;
pub mod cli;
pub mod config;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod harness;
pub mod manifest;
pub mod potential;
pub mod roughness;
pub mod stokes;
pub mod walllaw;

pub use error::{Error, Result};
