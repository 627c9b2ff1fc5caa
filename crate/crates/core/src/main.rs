fn main() {
    let code = moldcool::cli::run(std::env::args_os());
    std::process::exit(code);
}
