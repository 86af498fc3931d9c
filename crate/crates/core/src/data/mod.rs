//! Dataset handling: manifests, vocabularies, batching, synthetic corpora.

pub mod batch;
pub mod manifest;
pub mod synthetic;
pub mod vocab;

pub use batch::{epoch_order, make_batches};
pub use manifest::{read_manifest, write_manifest, UtteranceSample};
pub use vocab::{validate_sample, Vocabulary};
