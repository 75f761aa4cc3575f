fn main() { std::process::exit(exoflex::cli::main()); }
