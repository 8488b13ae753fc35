pub mod attacks;
pub mod bits;
pub mod classify;
pub mod games;
pub mod operators;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod schemes;

pub type State = qsim::QuantumState<f64>;
pub type State32 = qsim::QuantumState<f32>;
