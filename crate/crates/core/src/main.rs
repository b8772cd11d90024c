fn main() {
    std::process::exit(gaugevqa::cli::main_with_args(std::env::args_os()));
}
