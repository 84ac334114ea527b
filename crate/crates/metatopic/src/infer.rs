//! Held-out inference.
