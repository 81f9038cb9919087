//! Toolkit for analysing masked graph modeling signals on molecules.
//!
//! The crate turns SMILES into heavy-atom graphs ([`molgraph`]), splits them
//! into motifs ([`motif`]), scores atoms ([`scoring`]), draws masks under the
//! common masking strategies ([`masking`]), derives prediction targets for
//! masked units ([`targets`]) and measures how informative those targets are
//! about a graph-level label ([`infotheory`]). [`workbench`] ties these
//! together into reproducible CSV/SVG reports.

pub mod cli;
pub mod infotheory;
pub mod masking;
pub mod molgraph;
pub mod motif;
pub mod rng;
pub mod scoring;
pub mod targets;
pub mod workbench;

pub use molgraph::{parse_smiles, LabeledRecord, MolGraph};
