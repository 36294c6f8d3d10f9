//! Bracket words, the word-field catalog and the `λ_I` / `Λ` machinery.

mod catalog;
mod word;

pub use catalog::{letter_cap, tuple_order, Catalog, CatalogCaps, CompiledTuples, HormanderReport, LambdaVector, WordTuple};
pub use word::{expand_bracket, word_degree, word_field_uncached, BracketTree, Degree, Word, WordCombination};
