//! Smooth Rank: risk modeling on censored survival data by reduction to
//! bipartite ranking.
//!
//! Training splits the records at a time threshold into "early failure" and
//! "no early failure" classes, builds one smoothed density-contrast predictor
//! per feature, weights each predictor by its two-class concordance and
//! averages them into a risk score. Evaluation uses Harrell's concordance
//! index on the original censored outcome.
//!
//! ```no_run
//! use smooth_rank::{data, model, concordance};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let ds = data::load_csv("data/pbc.csv", &data::Schema::default())?;
//! let fit = model::train(&ds, &model::SmoothRankConfig::default())?;
//! let scores = fit.score_dataset(&ds)?;
//! let ci = concordance::concordance_index(&scores, &ds.targets())?;
//! println!("training CI {ci:.3} with {} active features", fit.surviving());
//! # Ok(())
//! # }
//! ```

pub mod concordance;
pub mod data;
pub mod density;
pub mod experiment;
pub mod loess;
pub mod model;
pub mod seeding;
pub mod synthetic;

pub use concordance::{concordance_index, ConcordanceCounts};
pub use data::{SurvivalDataset, SurvivalRecord};
pub use model::{train, SmoothRankConfig, SmoothRankModel};
