//! Graph kernels that compare labeled, attributed graphs through the edges
//! and shortest paths whose refined neighborhoods match.
//!
//! The crate revolves around three kernel families over Weisfeiler-Leman
//! refined graphs:
//!
//! * an edge convolution kernel that weighs matching edge neighborhoods by a
//!   base kernel on the endpoint attributes,
//! * a histogram overlap kernel that counts matching edge neighborhoods,
//! * a shortest-path variant that matches whole path color sequences.
//!
//! Gram matrices over a dataset can be filled by two interchangeable
//! schemes, one walking per-pair product graphs and one iterating shared
//! feature buckets, which agree to floating-point noise and are both exact
//! for the counting kernel. A brute-force oracle module re-implements every
//! kernel definition independently for validation.
//!
//! Modules:
//!
//! * [`graph`]: graphs, datasets, symbol interning
//! * [`tu`]: flat-text dataset reader and writer
//! * [`synth`]: seed-deterministic random graph generation
//! * [`wl`]: color refinement, edge addresses, feature indexes
//! * [`product`]: direct product graphs and convolution pairs
//! * [`kernels`]: base kernels and the edge-level kernel family
//! * [`hierarchy`]: refinement hierarchy and histogram intersection
//! * [`paths`]: canonical shortest paths and the path kernel
//! * [`engine`]: Gram matrices, validation, normalization, k-NN evaluation
//! * [`gram_io`]: CSV, binary and JSON output formats
//! * [`oracle`]: independent brute-force reference implementations
//! * [`dot`]: Graphviz exports for inspection
//! * [`testkit`]: deterministic fixtures shared by the test suites

pub mod dot;
pub mod engine;
pub mod gram_io;
pub mod graph;
pub mod hierarchy;
pub mod kernels;
pub mod oracle;
pub mod paths;
pub mod product;
pub mod synth;
pub mod testkit;
pub mod tu;
pub mod wl;

pub use engine::{gram, EngineOptions, GramMatrix};
pub use graph::{Dataset, DatasetBuilder, Graph, GraphError, SymbolTable};
pub use kernels::{BaseKernelSpec, KernelConfig, KernelKind, Scheme};
pub use synth::{generate_synthetic, generate_two_class};
pub use tu::{parse_tu_dataset, write_tu_dataset};
pub use wl::{refine, ColorAssignment, ColorDictionary, EdgeAddress};
