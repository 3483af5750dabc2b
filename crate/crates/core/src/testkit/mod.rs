//! Ground truth for tests and benchmarks: a planted-fragment generator and
//! an exhaustive common-subgraph oracle.

mod generate;
mod oracle;
mod shapes;

pub use generate::{generate_pair, random_fragment, triangle_seed, Growth, Noise, PlantSpec, PlantedPair};
pub use oracle::{
    compare_to_oracle, exact_mcs, planted_recall, BudgetExceeded, McsResult, OracleComparison, DEFAULT_NODE_BUDGET,
};
pub use shapes::{connected_shapes, Shape};
