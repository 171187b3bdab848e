//! Command line front end: replicated synthetic experiments plus greedy
//! screening and sparse fitting of CSV datasets.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod simulate;
