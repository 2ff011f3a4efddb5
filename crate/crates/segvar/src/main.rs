fn main() {
    std::process::exit(segvar::cli::run(std::env::args_os()));
}
