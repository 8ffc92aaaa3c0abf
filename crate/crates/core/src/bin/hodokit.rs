fn main() {
    std::process::exit(hodokit::cli::main())
}
