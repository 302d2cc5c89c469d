pub mod campaign;
pub mod choice_source;
pub mod corpus;
pub mod diversity;
pub mod generators;
pub mod harness;
pub mod mutation;
pub mod params_file;
pub mod stats;
