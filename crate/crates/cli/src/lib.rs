//! The `meltmap` command line and HTTP service. Both are thin layers over
//! `meltmap::api`, so a command and its endpoint give identical numbers.

pub mod cli;
pub mod server;
