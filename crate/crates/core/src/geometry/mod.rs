//! Implicit domains, element classification, cut-cell decomposition and the
//! element and face sets of the fictitious domain.

mod cut;
mod cut_mesh;
mod level_set;
mod svg;

pub use cut::{
    classify_element, cut_element, BoundarySegment, Classification, CutDecomposition, VertexSign,
    SNAP_TOLERANCE,
};
pub use cut_mesh::{collect_cut_sets, validate_assumptions, AssumptionReport, CutMesh, CutSets};
pub use level_set::{LevelSet, LevelSetDomain};
pub use svg::{render_svg, write_svg};
