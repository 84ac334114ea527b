//! Model parameters, forward pass, gradients, and checkpointing.
