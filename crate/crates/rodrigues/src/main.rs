use std::io;

fn main() {
    let (mut o, mut e) = (io::stdout().lock(), io::stderr().lock());
    let code = rodrigues::cli::run(std::env::args_os(), &mut rodrigues::cli::Output { stdout: &mut o, stderr: &mut e });
    std::process::exit(code);
}
