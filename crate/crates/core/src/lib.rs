//! Design-space exploration for small convolutional networks.
//!
//! - [`ir`]: architecture graphs, shape inference, descriptors
//! - [`cost`]: parameters, storage, MACs, activation footprint, energy
//! - [`zoo`]: SqueezeNet/Fire, AlexNet, VGG-19 and MobileNet-style generators
//! - [`dse`]: grid sweeps, saturation points, Pareto fronts, budgets
//! - [`compress`]: prune, k-means quantize and Huffman-code weights
//! - [`exec`]: naive reference forward pass used as an oracle
//! - [`verify`]: randomized cross-checks between the above

pub mod ir;
pub mod cost;
pub mod units;
pub mod zoo;
pub mod exec;
pub mod weights;
pub mod compress;
pub mod dse;
pub mod verify;
