pub mod basis;
pub mod linalg;
pub mod problem;
pub mod solver;
pub mod metrics;
pub mod stability;
pub mod expr;
