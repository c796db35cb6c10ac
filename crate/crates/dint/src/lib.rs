//! File formats, benchmarks, oracle checks and the command-line front end
//! for [`dint_core`].

pub mod bench;
pub mod checks;
pub mod cli;
pub mod gen;
pub mod io;
