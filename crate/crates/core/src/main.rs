fn main() {
    std::process::exit(surface_poisson::cli::main_with_args(std::env::args_os()));
}
