//! Elliptic paired coordinates (EPC).
//!
//! An n-D point becomes a short directed graph in the plane: every pair of
//! coordinates is anchored on a central ellipse, each anchor spawns a side
//! ellipse of the same size, and the two side ellipses cross in one node.
//! The mapping is invertible, so nothing is lost in the picture.
//!
//! On top of the embedding sit dominance rectangles: axis-aligned regions
//! of the plane where one class dominates, mined automatically or drawn by
//! hand, and applied as an ordered rule list.
//!
//! ```
//! use epc_core::geometry::{EllipseSpec, Layout, LayoutConfig, LayoutMode};
//!
//! let layout = Layout::new(LayoutConfig::new(LayoutMode::Mirror, 4), EllipseSpec::unit()).unwrap();
//! let x = [0.3, 0.5, 0.5, 0.2];
//! let graph = layout.embed(&x).unwrap();
//! assert_eq!(graph.nodes.len(), 2);
//! let back = layout.invert(&graph).unwrap();
//! assert!(back.iter().zip(x).all(|(a, b)| (a - b).abs() < 1e-9));
//! ```

pub mod data;
pub mod error;
pub mod geometry;
pub mod pipeline;
pub mod recipes;
pub mod rules;
pub mod scene;

pub use error::{DataError, Error, GeometryError, RulesError, SceneError};
