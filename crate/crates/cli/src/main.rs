use anyhow::Result;
use clap::Parser;

use gevkit_cli::commands::{self, Cli};

fn main() -> Result<()> {
    let cli = Cli::parse();
    commands::run(&cli)
}
