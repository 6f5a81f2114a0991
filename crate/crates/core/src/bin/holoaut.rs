fn main() {
    std::process::exit(holoaut::cli::main_with_args(std::env::args_os()));
}
