use clap::Parser;

fn main() {
    let cli = wkb_lab_cli::Cli::parse();
    std::process::exit(wkb_lab_cli::execute(cli));
}
