pub mod detect;
pub mod estimate;
pub mod geom;
pub mod harness;
pub mod simulate;
pub mod sstats;
