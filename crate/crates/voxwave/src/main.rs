use clap::Parser;
use voxwave::cli::{run, Cli};

fn main() {
    // clap exits with code 2 on usage errors before we get here.
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {}", e);
        std::process::exit(e.exit_code());
    }
}
