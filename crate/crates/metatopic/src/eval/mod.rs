//! Topic extraction and quantitative metrics.
