use clap::Parser;
use ips_tools::cli::{run, Cli, Io};

fn main() {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    let code = run(cli, &mut Io { out: &mut out, err: &mut err });
    std::process::exit(code);
}
