//! Shape-and-grasp distance fields for parallel-jaw grasping.
//!
//! The crate covers the full loop around a learned shape-and-grasp distance
//! function (SGDF): ground-truth label generation from meshes, auto-decoder
//! training with jointly optimized per-object latent codes, and a grasp
//! planning pipeline that decodes surface points and grasp manifolds from
//! the trained field, refines object poses with point-to-plane ICP, filters
//! colliding grasps against the observed cloud, and selects the grasp with
//! the lowest gravity torque about the object centroid.
//!
//! Module map:
//! - [`geometry`]: rigid transforms, triangle meshes, signed distance
//!   queries, surface sampling, ray-cast depth rendering, voxelization.
//! - [`gripper`]: the parallel-jaw gripper model, antipodality and
//!   collision tests.
//! - [`datagen`]: grasp candidate generation and labeling, SGDF point
//!   sampling, packed scenes, image-space labels, dataset storage.
//! - [`sgdf`]: the auto-decoder network, losses, gradients, training.
//! - [`percept`]: encoder-side machinery (peak extraction, detection
//!   decoding, encoder losses, a noise-injected oracle encoder).
//! - [`pipeline`]: grid decoding, ICP refinement, collision filtering and
//!   torque-based grasp selection.
//! - [`eval`]: Chamfer distance, 3D IoU, episode protocol, success and
//!   declutter rates, friction-sweep grasp quality.
//! - [`cli`]: command-line entry points and run configuration.

pub mod cli;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod gripper;
pub mod kdtree;
pub mod percept;
pub mod pipeline;
pub mod seed;
pub mod sgdf;

pub use error::{Error, Result};
