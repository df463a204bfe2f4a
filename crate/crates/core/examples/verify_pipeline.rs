//! The command-line pipeline driven in-process: `verify --all` on a shipped
//! config, with the report captured.
use std::path::PathBuf;

fn main() {
    let config = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/mixed_1x2.json");
    let mut out = Vec::new();
    let mut err = Vec::new();
    let args = ["cmvmop", "verify", "--all", "--config", config.to_str().unwrap()];
    let code = cmv_mop::cli::run(args, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&err));
    println!("exit code {code}, report {} bytes", out.len());
}
