use std::io::{self, Write};
use std::process::exit;

fn main() {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let code = optcap_cli::run(std::env::args_os(), &mut out, &mut io::stderr());
    if out.flush().is_err() {
        exit(optcap_cli::EXIT_USAGE);
    }
    exit(code);
}
