//! Command-line interface (to be wired once all subsystems exist).

/// Placeholder exit so the binary builds during bring-up.
pub fn run() -> i32 { 0 }
