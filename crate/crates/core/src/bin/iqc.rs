use clap::Parser;

fn main() {
    let cli = iqc::cli::Cli::parse();
    std::process::exit(iqc::cli::run(&cli));
}
