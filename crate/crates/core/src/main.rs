fn main() {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = trussbo::cli::run(
        std::env::args_os(),
        std::env::var(trussbo::cli::SEED_ENV).ok(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    );
    std::process::exit(code);
}
