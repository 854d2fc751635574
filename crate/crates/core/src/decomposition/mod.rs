//! Non-overlapping subdomain partitions, the average interpolation `I_A`,
//! and the coarse space built from it.

mod coarse;
mod partition;

pub use coarse::{CoarseMap, CoarseSpace};
pub use partition::{apply_ia, build_block_partition, layer_contrast, LayerContrast, Partition, Subdomain};
