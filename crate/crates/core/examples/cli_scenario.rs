//! Drives the command line in-process from a scenario file.

use exoflex::cli::{run, Scenario};

fn main() {
    let dir = std::env::temp_dir().join("exoflex-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    let scenario = Scenario { params: [-0.15, 0.55, 0.1, 0.45], samples: 128, ..Scenario::default() };
    let path = dir.join("scenario.toml");
    std::fs::write(&path, scenario.to_toml()).expect("write scenario");

    let path = path.to_string_lossy();
    let out = dir.to_string_lossy();
    let code = run(["exoflex", "sweep", "--scenario", &path, "--out", &out]);
    println!("sweep exited {code}; profiles in {out}");
}
