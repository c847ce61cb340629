//! Augmentation varieties of Legendrian 2-bridge links in rational form, their
//! cluster structures, fillings from pinching sequences, and normal rulings.

pub mod augvar;
pub mod bridge;
pub mod cli;
pub mod cluster;
pub mod continuant;
pub mod dga;
pub mod fillings;
pub mod polygon;
pub mod render;
pub mod ring;
pub mod rulings;

/// Default cap on brute-force candidate counts; `LEGCLUS_BUDGET` overrides it.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

pub fn budget() -> u128 {
    std::env::var("LEGCLUS_BUDGET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}
