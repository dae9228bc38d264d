pub mod acceptance;
pub mod charsum;
pub mod cli;
pub mod counting;
pub mod denef;
pub mod gf;
pub mod poles;
pub mod polyfield;
pub mod wound;
