//! Finite-universe stochastic choice.
//!
//! Build random choice rules of the general Luce form, check the choice axioms
//! with violation witnesses, decompose a rule into its rational support and
//! tie-breaking weights, simulate random-preference models and estimate the
//! weights from choice counts.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`universe`] | alternatives, subsets, families of choice sets |
//! | [`prob`] | exact/float probabilities and extended ratios |
//! | [`rule`], [`correspondence`], [`order`] | the core data model |
//! | [`axioms`] | checkers for the choice axiom, its equivalent forms, WARP and conditioning |
//! | [`decompose`] | recover `(Γ, α)` from a rule satisfying the choice axiom |
//! | [`synthesize`] | build Luce, general Luce and noise-smoothed logit rules |
//! | [`rum`] | Gumbel and lexicographic preference samplers, empirical rules |
//! | [`estimate`] | support and weight estimation from counts |
//! | [`instances`] | random generators for orders, weights and perturbed rules |

pub mod axioms;
pub mod correspondence;
pub mod decompose;
mod error;
pub mod estimate;
pub mod instances;
pub mod order;
pub mod prob;
pub mod rule;
pub mod rum;
pub mod synthesize;
pub mod universe;

#[cfg(test)]
mod fixtures;

pub use axioms::{check_all, Axiom, AxiomReport, Quantity, Verdict, Witness};
pub use correspondence::ChoiceCorrespondence;
pub use decompose::{decompose, LuceDecomposition};
pub use error::{Error, Result};
pub use order::WeakOrder;
pub use prob::{ExtendedRatio, Mode, Prob};
pub use rule::RandomChoiceRule;
pub use synthesize::{LuceWeights, NoiseLevel, UtilitySpec};
pub use universe::{AltSet, ChoiceFamily, ChoiceSet, Completeness, Universe};
