mod classify;
mod kernel;
mod report;
mod sets;

pub use classify::{point_leaf, point_spectrum, quadratic_spectrum, spectrum, spectrum_lower_bound, spectrum_of, PointLeaf};
pub use kernel::{
    covering_obstruction, kernel_dim, CoveringObstruction, CoveringVerdict, IntersectionKernel, KernelDim, Piece,
    PieceKernel,
};
pub use report::{ClassificationReport, DimLabel, EigenDim, EigenRule, REPORT_VERSION};
pub use sets::SetExpr;
