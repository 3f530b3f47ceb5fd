use clap::Parser;

fn main() {
    let cli = weakgeo::cli::Cli::parse();
    std::process::exit(weakgeo::cli::execute(cli));
}
