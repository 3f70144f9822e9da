pub mod arrangement;
pub mod cancellation;
pub mod complexes;
pub mod cx;
pub mod geometry;
pub mod inscribed;
pub mod extension;
pub mod group;
pub mod homology;
pub mod rational;
pub mod report;
pub mod samples;
pub mod surface;
pub mod triangulation;
pub mod util;
