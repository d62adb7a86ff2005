pub mod augmented;
pub mod convexity;
pub mod error;
pub mod ghr;
pub mod optimize;
pub mod qlinalg;
pub mod quaternion;
pub mod random;

pub use error::{Error, Result};
pub use qlinalg::{ComplexAdjoint, QMatrix, QVector};
pub use quaternion::{qmul, Axis, Quaternion};
