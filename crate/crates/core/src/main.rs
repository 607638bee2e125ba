use clap::Parser;

fn main() {
    let cli = tfn_core::cli::Cli::parse();
    std::process::exit(tfn_core::cli::execute(cli));
}
