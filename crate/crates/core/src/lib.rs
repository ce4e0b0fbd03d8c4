//! Daily emotion time series from official bulletins and tweets, with
//! unit-root and Granger-causality testing between the two sources.
//!
//! The modules follow the pipeline order: [`corpus`] loads documents,
//! [`textprep`] tokenizes them, [`lexicon`] scores them per category,
//! [`series`] builds daily series, [`econ`] tests them and [`report`]
//! renders the tables. [`pipeline`] wires everything to a TOML config and
//! [`synth`] generates corpora with a known lead-lag structure.

pub mod corpus;
pub mod econ;
pub mod lexicon;
pub mod pipeline;
pub mod report;
pub mod series;
pub mod synth;
pub mod textprep;
