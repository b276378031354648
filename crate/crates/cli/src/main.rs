// Copyright 2026 The qmc-engine Authors
// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    let cli = qmc_frontend::Cli::parse();
    if let Err(e) = qmc_frontend::run(&cli) {
        eprintln!("qmc: {e}");
        std::process::exit(e.exit_code());
    }
}
