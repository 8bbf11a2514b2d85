//! Triangular-lattice geometry: hexagons, boundary loops, e-vertices and
//! δ-approximations of continuum domains.

mod approx;
mod domain;
mod hex;

pub use approx::{approximate_shape, build_delta_approximation};
pub use domain::{BoundaryArcs, DomainExport, LatticeDomain};
pub use hex::{Edge, Hex, Vertex, DIRECTIONS};
