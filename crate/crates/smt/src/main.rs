use std::io::Write;

fn main() {
    let color = std::env::var("SMT_COLOR").is_ok_and(|v| v == "1");
    let out = smt::cli::run(std::env::args_os(), color);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::io::stdout().flush().ok();
    std::process::exit(out.code);
}
