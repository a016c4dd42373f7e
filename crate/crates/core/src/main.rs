fn main() {
    std::process::exit(renyigap::cli::run(std::env::args_os()));
}
