use clap::Parser;

fn main() {
    let flags = ueigen::cli::Flags::parse();
    match ueigen::cli::run(&flags) {
        Ok(out) => {
            print!("{}", out.text);
            std::process::exit(out.exit_code);
        }
        Err(e) => {
            eprintln!("error: {}", e);
            std::process::exit(1);
        }
    }
}
