//! Boosted-tree rank prediction from creativity vectors, evaluated with
//! Kendall's tau under cross-validation.

mod corpus;
mod experiment;
mod gbt;
mod labels;
mod tau;

pub use corpus::{synthetic_labels, PairSum, ScoredCorpus, SYNTHETIC_COEFFICIENTS};
pub use experiment::{
    evaluate, make_folds, run_experiment, train_model, Dataset, EvalReport, FoldReport,
    GroupReport, Mode, Protocol, Target, TargetReport, DEFAULT_SEED,
};
pub use gbt::{fit_gbt, predict, GbtModel, GbtParams, Node, RegressionTree, MODEL_MAGIC};
pub use labels::{weighted_combination, ExpertLabels, ExpertWeights, LabelRow};
pub use tau::{kendall_tau, kendall_tau_touching, restricted_tau, TauVariant};
