#![allow(dead_code)]

use std::path::PathBuf;

use drcs_core::drcs::{build_drcs, DrcsSet};
use drcs_core::hadamard::dft_matrix;
use drcs_core::rectangle::product_construct;
use drcs_core::Rectangle;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

pub fn fixture(name: &str) -> Rectangle {
    let text = std::fs::read_to_string(data_path(name)).expect("fixture readable");
    serde_json::from_str(&text).expect("fixture parses")
}

pub const FIXTURES: [&str; 4] = ["example1.json", "example2_a.json", "example2_b.json", "example2_d.json"];

/// The 6 x 56 rectangle over Z_63 from the printed factors.
pub fn rect63() -> Rectangle {
    product_construct(&fixture("example2_a.json"), &fixture("example2_b.json")).expect("valid factors")
}

/// Six flocks of 63 sequences of length 56 over Z_63.
pub fn set63() -> DrcsSet {
    build_drcs(&rect63(), &dft_matrix(63)).expect("valid inputs")
}
