use std::path::PathBuf;

fn main() {
    let path: PathBuf = std::env::args().nth(1).expect("scenario path").into();
    match termin_core::harness::run_scenario(&path) {
        Ok(t) => print!("{t}"),
        Err(e) => eprintln!("{e}"),
    }
}
