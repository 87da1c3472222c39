fn main() {
    std::process::exit(cascade_bench::cli::run(std::env::args_os()));
}
