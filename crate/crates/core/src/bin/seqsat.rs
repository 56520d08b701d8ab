fn main() {
    std::process::exit(seqsat::cli::dispatch(std::env::args_os()));
}
