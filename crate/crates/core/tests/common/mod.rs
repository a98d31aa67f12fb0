// MAX_ULPS may be zero
#![allow(dead_code, clippy::absurd_extreme_comparisons)]

pub mod formula;
