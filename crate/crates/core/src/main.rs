fn main() {
    std::process::exit(dqprep::cli::run(std::env::args_os()));
}
