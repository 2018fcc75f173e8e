use clap::Parser;

fn main() {
    let cli = nullcone::cli::Cli::parse();
    std::process::exit(nullcone::cli::run(cli));
}
