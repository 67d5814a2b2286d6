pub mod error;
pub mod graph;
pub mod ldim;
pub mod lti;
pub mod wiener;
pub mod gemd;
pub mod harness;
pub mod orientation;
pub mod faithfulness;
pub mod cli;
