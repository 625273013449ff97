fn main() {
    std::process::exit(sponge::cli::run());
}
