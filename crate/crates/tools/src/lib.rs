//! Text formats, certificate files, the experiment runner and the `ips`
//! command line on top of `ips-core`.

pub mod certfile;
pub mod cli;
pub mod experiment;
pub mod text;
