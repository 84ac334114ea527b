fn main() {
    std::process::exit(metatopic::cli::run());
}
