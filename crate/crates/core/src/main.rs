fn main() {
    std::process::exit(musynth::cli::main_from_env());
}
