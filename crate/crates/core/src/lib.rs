// SPDX-License-Identifier: Apache-2.0
//! Pumpability and fragility analysis for temperature-1 tile assembly paths.

pub mod analysis;
pub mod driver;
pub mod geometry;
pub mod io;
pub mod oracle;
pub mod shield;
pub mod svg;
pub mod tam;
