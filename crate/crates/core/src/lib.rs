//! Large-scale many-objective optimization with mixed competitive-swarm and
//! distributional-adversarial offspring under reference-vector-guided
//! selection, together with the LSMOP benchmark suite, IGD, and baseline
//! algorithms for comparative experiments.

pub mod baselines;
pub mod dan;
pub mod error;
pub mod harness;
pub mod lmocso;
pub mod lsmop;
pub mod metrics;
pub mod moea_csod;
pub mod refvec;
pub mod rng;
pub mod selection;
pub mod types;

pub use error::{Error, Result};
pub use lsmop::LsmopInstance;
pub use moea_csod::{CsodConfig, RunResult};
pub use refvec::ReferenceVectorSet;
pub use rng::RngStream;
pub use types::{Bounds, Individual, Population, Problem};
