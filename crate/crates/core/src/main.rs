fn main() {
    std::process::exit(pdlsim::cli::main_with_args(std::env::args_os()));
}
