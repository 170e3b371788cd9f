//! Graph file formats, reports, the analysis session service and the `repkg`
//! command line on top of `repkg-core`.

pub mod cli;
pub mod format;
pub mod report;
pub mod server;
pub mod session;
