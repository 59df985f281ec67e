fn main() {
    std::process::exit(parobs::cli::main_with_args(std::env::args_os()));
}
