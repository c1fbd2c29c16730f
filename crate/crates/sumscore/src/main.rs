use std::process;

fn main() {
    process::exit(sumscore::cli::run());
}
