fn main() {
    std::process::exit(trigsys::cli::run(std::env::args_os()));
}
