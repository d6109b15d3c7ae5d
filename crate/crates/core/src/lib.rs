//! Core surfaces of subgroups of surface groups: word calculus, tiled surfaces,
//! folding with boundary reduction, and a covering-space oracle.

pub mod blocks;
pub mod core_analysis;
pub mod cover_oracle;
pub mod error;
pub mod folding_engine;
pub mod group_words;
pub mod presentation;
pub mod serial;
pub mod tiled_surface;

pub use error::Error;
pub use presentation::{CyclicWord, Letter, Presentation, Word};
pub use tiled_surface::{BoundaryCycle, Morphism, Step, TiledSurface};
pub use folding_engine::{core_surface_from_generators, FoldingEngine, PointedCoreSurface, PreComplex};
