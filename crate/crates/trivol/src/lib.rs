//! Exact normal-surface and angle-structure theory on triangulated closed
//! oriented pseudo 3-manifolds, with Lobachevsky volume maximization over
//! circle-valued angle structures and extraction of either a verified
//! solution of the gluing equations (smooth maximum) or an exact
//! 2-quad-type solution of the normal surface equations (non-smooth
//! maximum).

pub mod angles;
pub mod linalg;
pub mod lobachevsky;
pub mod normal;
pub mod outcomes;
pub mod report;
pub mod rq;
pub mod tri;
pub mod volume;
pub mod z2taut;
