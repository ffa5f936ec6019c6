//! Free operated Lie algebras over an ordered alphabet: Lyndon-Shirshov
//! bracketed words, invariant monomial orders, compositions and bounded
//! reduction, and a checker for operated Lie polynomial identities.

pub mod cli;
pub mod lie;
pub mod lyndon;
pub mod order;
pub mod scalar;
pub mod word;
pub mod rewrite;
pub mod olpi;
