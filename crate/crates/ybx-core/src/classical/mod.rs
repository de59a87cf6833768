//! Classical side: the Yang-Baxter map on the Poisson algebra and the
//! periodic-chain evolution it generates.

pub mod lattice;
pub mod map;
