fn main() {
    std::process::exit(pftrail::cli::run(std::env::args_os()));
}
