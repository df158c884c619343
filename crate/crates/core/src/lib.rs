pub mod algebra;
pub mod construction;
pub mod discovery;
pub mod dsl;
pub mod groebner;
pub mod numeric;
pub mod poly;
pub mod prover;
pub mod registry;
pub mod statement;
pub mod triangular;

pub use construction::{Construction, StepKind};
pub use discovery::{discover, DiscoveryConfig, DiscoveryError, DiscoveryReport, Theorem, TheoremKind};
pub use dsl::{parse_dsl, DslError, ParsedFile};
pub use numeric::NumericConfig;
pub use prover::{decide_statement, ProofVerdict, ProverConfig, Verdict};
pub use registry::Registry;
pub use statement::{PointId, Statement, StatementKind};
