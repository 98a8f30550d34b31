#![allow(dead_code)]

pub mod fixtures;
pub mod oracle;
pub mod random;
pub mod scaling;
