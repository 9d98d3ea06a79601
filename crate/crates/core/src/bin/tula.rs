fn main() {
    std::process::exit(tamed_langevin::harness::cli::main_with_args(std::env::args_os()));
}
