// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

use cascade_cli::{run, Cli};

fn main() {
    let cli = Cli::parse();
    if cli.seed.is_some() {
        eprintln!("note: --seed is reserved; every command is deterministic");
    }
    match run(&cli) {
        Ok(manifest) => {
            for path in &manifest.outputs {
                println!("{}", path.display());
            }
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            std::process::exit(e.exit_code());
        }
    }
}
