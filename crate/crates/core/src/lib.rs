//! Allen's interval algebra: composition, path consistency with skipping
//! shortcuts, tractable-subclass decomposition, backtracking search, random
//! instance generators, and a benchmark harness.

pub mod algebra;
pub mod bench;
pub mod generate;
pub mod network;
pub mod pathcon;
pub mod search;
pub mod tractable;

pub use algebra::{Basic, Composition, Label};
pub use network::{EdgeRef, Network};
pub use pathcon::{path_consistency, PcConfig, PcOutcome, PcStats, PcVerdict, QueuePolicy, SkipSet};
pub use search::{backtrack_solve, SearchConfig, SearchOutcome};
pub use tractable::Method;
