use clap::Parser;

use asymkit_cli::{report::emit, run, Cli};

fn main() {
    let cli = Cli::parse();
    let out = match &cli.command {
        asymkit_cli::Command::Measure { opts, .. }
        | asymkit_cli::Command::Rate { opts, .. }
        | asymkit_cli::Command::Channel { opts, .. }
        | asymkit_cli::Command::Simulate { opts, .. } => opts.out.clone(),
    };
    let result = run(&cli).and_then(|o| emit(&o.text(), out.as_deref()));
    if let Err(e) = result {
        eprintln!("asymkit: {e}");
        std::process::exit(e.exit_code());
    }
}
