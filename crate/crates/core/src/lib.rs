pub mod error;
pub mod fixtures;
pub mod model;
pub mod order;
pub mod polytope;
pub mod rational;
pub mod scarf;
pub mod shm;

pub use error::{Error, Result};
pub mod cacq;
pub mod certificate;
pub mod cli;
pub mod io;
pub mod oracle;
pub mod smf;
