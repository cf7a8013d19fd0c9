use clap::Parser;

fn main() {
    let cli = porverif::cli::Cli::parse();
    let code = porverif::cli::run(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
