fn main() {
    std::process::exit(regfrac::cli::main_with_args(std::env::args_os()));
}
