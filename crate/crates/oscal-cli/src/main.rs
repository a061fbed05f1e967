//! Thin binary shim; all logic lives in the library so integration tests
//! can exercise the same types the binary serializes.

use clap::Parser;

fn main() {
    let cli = oscal_cli::Cli::parse();
    std::process::exit(oscal_cli::run(&cli));
}
