//! Command-line front end: the germ description grammar, the analysis
//! pipeline and its reports.

pub mod analysis;
pub mod input;
pub mod render;

pub use analysis::{run, AnalysisReport, AnalysisRequest, Outcome, RequestError, Task};
pub use input::{parse_field, print_field, InputError};
pub use render::{render, Format};
