use std::io::Write;

fn main() {
    let out = qflg::cli::run_args(std::env::args_os().skip(1));
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.output.as_bytes());
    let _ = stdout.flush();
    std::process::exit(out.code);
}
