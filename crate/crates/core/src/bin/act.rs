fn main() {
    std::process::exit(adaptive_ct::cli::run(std::env::args_os()));
}
