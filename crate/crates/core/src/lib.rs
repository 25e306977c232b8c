//! Workload-profile recursions for parallel queues under join-the-shortest-
//! workload (JSW) and rank-`P` allocation, Loynes's stationary construction,
//! the tail-sum orderings that compare them, and coupled-path harnesses that
//! check the comparisons along every simulated path.

pub mod cli;
pub mod comparison;
pub mod config;
pub mod error;
pub mod lemmas;
pub mod loynes;
pub mod orderings;
pub mod processes;
pub mod profile;

pub use error::{Error, Result};
pub use profile::{
    kw_step, offered_wait, pad, pth_step, sort_ascending, sort_raw, total_workload, Mark, SortedProfile,
};
