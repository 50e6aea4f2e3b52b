use std::io::Write;

fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    let code = qdc_core::cli::run(std::env::args_os(), &mut out, &mut err);
    let _ = out.flush();
    // abandoned over-budget checks may still be running; don't wait for them
    std::process::exit(code);
}
