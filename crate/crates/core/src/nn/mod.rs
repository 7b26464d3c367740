//! Dense double-precision tensors, a reverse-mode tape, and the layers the
//! generator and critic are built from.

pub mod layers;
pub mod optim;
pub mod params;
pub mod tape;
pub mod tensor;

pub use layers::{BiLstm, BoundLinear, BoundLstm, Linear, LstmCell};
pub use optim::{RmsProp, RmsPropConfig};
pub use params::{init_params, ParamKind, ParamSet, ParamSpec, Parameter};
pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;
