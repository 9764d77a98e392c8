//! Euler characteristic, perimeter, area and volume curves of 2D images and
//! 3D volumes.
//!
//! A single pass over the field's vertices records, for each local
//! configuration type, the levels at which it appears and disappears. Any
//! additive descriptor curve is then a weighted sum of running counts, so
//! adding a descriptor costs O(M) rather than another pass over the data.
//!
//! ```
//! use ecurve::{descriptors, contrib2d, Field2D};
//!
//! let field = Field2D::new(2, 2, vec![0, 1, 1, 0], 1)?;
//! let map = contrib2d::gather_2d_serial(&field)?;
//! let table = descriptors::builtin_weights(
//!     descriptors::Descriptor::Ec,
//!     descriptors::Connectivity::C8,
//!     ecurve::Dimension::Two,
//! )?;
//! let curve = descriptors::descriptor_curve(&map, &table)?;
//! assert_eq!(curve.values(), vec![1.0, 1.0]);
//! # Ok::<(), ecurve::Error>(())
//! ```

pub mod cli;
pub mod contrib2d;
pub mod contrib3d;
pub mod descriptors;
pub mod error;
pub mod field;
pub mod histogram;
pub mod ingest;
pub mod oracle;
pub mod parallel;
pub mod source;

pub use contrib2d::{gather_2d_parallel, gather_2d_serial, ContributionMap2D, ContributionType2D};
pub use contrib3d::{gather_3d_parallel, gather_3d_serial, ContributionMap3D, ContributionType3D};
pub use descriptors::{
    builtin_weights, descriptor_curve, descriptor_curves, Connectivity, Descriptor,
    DescriptorCurve, WeightTable,
};
pub use error::{Error, Result};
pub use field::{quantize, random_field_2d, random_field_3d, Distribution, Field2D, Field3D};
pub use histogram::{Contributions, Dimension, Histograms};
pub use source::{Reader2D, Reader3D, Source2D, Source3D, SourceMode};
