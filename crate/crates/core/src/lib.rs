pub mod beta_shift;
pub mod cli;
pub mod cf_expansion;
pub mod correspondence;
pub mod lambda_dynamics;
pub mod numerics;
pub mod selftest;
pub mod symbolic;
