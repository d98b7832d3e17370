use std::io::Write;

fn main() {
    let outcome = projgeom::cli::run(std::env::args_os());
    if let Some(msg) = &outcome.stderr {
        eprintln!("{}", msg.trim_end());
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", outcome.stdout.trim_end());
    let _ = out.flush();
    std::process::exit(outcome.code);
}
