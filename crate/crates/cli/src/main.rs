fn main() {
    std::process::exit(packing_bounds_cli::main_with_args(std::env::args_os()));
}
