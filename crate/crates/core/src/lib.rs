pub mod constitutive;
pub mod error;
pub mod fem;
pub mod kinematics;
pub mod liegroup;
pub mod magnetics;
pub mod scenario;
pub mod solver;

pub use error::{Result, ShellError};
