fn main() {
    std::process::exit(fiberacf::cli::run(std::env::args_os().collect()));
}
