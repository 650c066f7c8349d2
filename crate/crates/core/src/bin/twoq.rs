fn main() {
    std::process::exit(twoq_synth::cli::run());
}
