//! Library side of the `confine-fp` command line: file formats, command
//! drivers and the validation suite. The binary in `main.rs` is a thin
//! argument-parsing layer over these functions, which keeps everything
//! reachable from integration tests.

pub mod commands;
pub mod formats;
pub mod validate;

/// Seed used when neither the environment nor a flag provides one.
pub const DEFAULT_SEED: u64 = 42;

/// Resolves the run seed: `CONFINE_FP_SEED` overrides the default.
pub fn seed_from_env() -> u64 {
    std::env::var("CONFINE_FP_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
