//! Domain, classes, the sup-norm, and the oracles every other module uses.

pub mod class;
pub mod design;
pub mod oracle;
pub mod sampler;

pub use class::{Body, Ellipsoid, FunctionClass, HPolytope, PBallImage, VPolytope};
pub use design::{Domain, SampleDesign};
pub use oracle::{p_quasinorm, sup_dist, sup_norm, FeasibleSection, PairWitness, Support};
pub use sampler::ClassSampler;
