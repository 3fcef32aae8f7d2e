pub mod artifacts;
pub mod cli;
pub mod domain_file;
pub mod report;
