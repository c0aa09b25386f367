fn main() {
    std::process::exit(rowland::cli::run());
}
