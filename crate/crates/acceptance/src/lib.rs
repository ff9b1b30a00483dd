//! Home of the `acceptance` test target, which runs every acceptance
//! criterion on the desk profile and prints one line per criterion.
//!
//! ```text
//! cargo test -p hallmhd-acceptance --test acceptance -- --nocapture
//! ```
