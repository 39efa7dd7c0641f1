fn main() {
    std::process::exit(lattice_collisions::cli::run(std::env::args_os()));
}
