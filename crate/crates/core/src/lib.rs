//! Arc algebras, tangle bimodules and their Burnside-category lifts.

pub mod burnside;
pub mod cli;
pub mod frames;
pub mod linalg;
pub mod linking;
pub mod phi;
pub mod planar;
pub mod qgroup;
pub mod ring;
pub mod shapes;
pub mod signed;
pub mod tqft;

pub use linalg::Matrix;
pub use ring::{Ring, RingKind, F2};

pub type MatrixZ = Matrix<i64>;
pub type MatrixF2 = Matrix<F2>;
pub type CobZ = tqft::Cob<i64>;
pub type CobF2 = tqft::Cob<F2>;
