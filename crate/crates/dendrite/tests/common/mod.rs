#![allow(dead_code)]
pub mod clo;
pub mod exhaustive;
pub mod kspace;
pub mod oracle;
pub mod scenes;
pub mod trees;
