fn main() {
    std::process::exit(fsmkit::cli::main_with_args(std::env::args_os()));
}
