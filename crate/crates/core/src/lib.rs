//! Basilica laminations, their altered pullbacks, and numerics for the
//! generalized McMullen family `F(z) = z^n + a/z^n + b`.
//!
//! The combinatorial side works with exact rational angles: [`lamination`]
//! builds the basilica lamination by pullback, [`gaps`] cuts the disk into
//! faces and names them, and [`alteration`] re-pairs identifications along a
//! face path to produce the lamination of an altered preimage. The numerical
//! side ([`dynamics`], [`render`]) evaluates the maps whose Julia sets carry
//! these structures.

pub mod alteration;
pub mod angle;
pub mod dynamics;
pub mod error;
pub mod gaps;
pub mod lamination;
pub mod render;
pub mod svg;

pub use alteration::{
    alter, leaf_diff, leaf_diff_report, toggle_pairing, AlterOptions, AlterationResult,
    AlterationStep, LeafDiff, Target,
};
pub use angle::Angle;
pub use dynamics::{
    classify_map, detect_attracting_cycle, iterate_orbit, symmetry_residual, Cycle, MapParams,
    MapReport, OrbitConfig, OrbitResult, OrbitStatus,
};
pub use error::{Error, Result};
pub use gaps::{
    adjacency_path, compute_gaps, gap_diff, label_gap, meeting_chord, name_to_label,
    ComponentLabel, Gap, GapDiff, GapGraph,
};
pub use lamination::{basilica, chords_cross, Chord, ChordDiff, Kind, Lamination, Verification};
pub use render::{
    pixel_mismatch, render_julia, rotation_mismatch, write_ppm, ImageBuffer, Palette, RenderConfig,
};
pub use svg::{lamination_to_svg, Highlight};
