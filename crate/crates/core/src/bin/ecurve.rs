fn main() {
    std::process::exit(ecurve::cli::main_with_args(std::env::args_os()));
}
