//! Exact interval geometry on `[0,1]`.

pub mod cantor;
pub mod cutout;
pub mod interval;
pub mod porous;
pub mod thick;

pub use cantor::{build_cantor, build_cantor_with_limit, ConstructionTree, DEFAULT_MAX_DEPTH};
pub use cutout::{Ambient, CutOutConfig};
pub use interval::{merge_closed, subtract_closed, union_length, RationalInterval};
pub use porous::{build_porous, build_porous_with_limits, PorousConstruction, PorousStage, DEFAULT_RESOLUTION};
pub use thick::{thick_from_cantor, verify_thick, ThickCondition, ThickPair, ThickStructure, ThickVerdict};
