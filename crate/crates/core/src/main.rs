fn main() {
    std::process::exit(convexkit::cli::run(std::env::args_os()));
}
