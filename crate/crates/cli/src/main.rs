fn main() {
    std::process::exit(hermitex_cli::run(std::env::args_os()));
}
