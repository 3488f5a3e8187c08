//! Dynamic exact counting of small induced subgraphs, subgraphs and
//! homomorphisms in sparse edge-colored graphs.
//!
//! The host graph is kept as a cascade of bounded in-degree orientations
//! whose union is a fraternal augmentation. Every query pattern is compiled
//! into signed sums of homomorphism counts of small elder digraphs, and one
//! [`ahom::AHomState`] per such digraph keeps its count current as the
//! augmentation changes. Queries are arithmetic over stored totals.
//!
//! ```
//! use dynsub::{ColoredGraph, ISubIndex, IndexConfig, Pattern};
//!
//! let mut host = ColoredGraph::with_vertices(1, 3);
//! host.add_edge(0, 1, 1).unwrap();
//! host.add_edge(1, 2, 1).unwrap();
//!
//! let triangle = Pattern::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
//! let mut index = ISubIndex::build(
//!     host,
//!     vec![("tri".to_string(), triangle)],
//!     IndexConfig::new(1),
//! )
//! .unwrap();
//! assert_eq!(index.count_induced("tri").unwrap(), 0u32.into());
//! index.add_edge(0, 2, 1).unwrap();
//! assert_eq!(index.count_induced("tri").unwrap(), 6u32.into());
//! ```

pub mod ahom;
pub mod augmentation;
mod error;
pub mod graph;
pub mod index;
pub mod oracle;
pub mod orientation;
pub mod pattern;
pub mod text;
pub mod workload;

pub use error::{Error, Result};
pub use graph::{Color, ColoredDigraph, ColoredGraph, VertexId};
pub use index::{ISubIndex, IndexConfig};
pub use pattern::{Pattern, SmallDigraph};
