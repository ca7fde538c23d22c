fn main() {
    std::process::exit(resorder::cli::run(std::env::args_os()));
}
