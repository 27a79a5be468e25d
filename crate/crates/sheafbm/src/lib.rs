pub mod cli;
pub mod formats;
pub mod run;
pub mod selftest;
