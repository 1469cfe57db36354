use std::io;

fn main() {
    let stdin = io::stdin();
    let status = chemtext::cli::run(std::env::args_os(), stdin.lock(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(status.code());
}
