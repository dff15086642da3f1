fn main() {
    std::process::exit(torsionlab::cli::run(std::env::args_os()));
}
