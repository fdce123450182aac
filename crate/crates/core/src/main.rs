fn main() {
    std::process::exit(ilim_core::harness::cli::run(std::env::args_os()));
}
