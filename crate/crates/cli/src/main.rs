fn main() {
    let code = arclaw_cli::dispatch(std::env::args().collect());
    std::process::exit(code);
}
