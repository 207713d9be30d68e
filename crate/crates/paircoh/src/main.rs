fn main() {
    std::process::exit(paircoh::cli::run());
}
