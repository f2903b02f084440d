fn main() {
    std::process::exit(sigdv::cli::main_with_args(std::env::args_os()));
}
