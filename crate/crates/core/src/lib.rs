pub mod linalg;
pub mod calculus;
pub mod operator;
pub mod scenario;
pub mod wave;
