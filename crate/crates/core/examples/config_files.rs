//! Loading converter configs and their derived quantities.

use std::path::Path;

use cmc_fsi::ConverterConfig;

fn main() -> cmc_fsi::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| cmc_fsi::Error::Io(e.to_string()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    for path in paths {
        let cfg = ConverterConfig::load(&path)?;
        let back = ConverterConfig::from_toml_str(&cfg.to_toml_string())?;
        println!("{}", path.file_name().unwrap_or_default().to_string_lossy());
        println!("  {}", cfg.summary());
        println!("  round trip equal: {}", back == cfg);
    }

    let bad = "topology = \"boost\"\nscheme = \"pcmc\"\nv_s = 5.0\n";
    match ConverterConfig::from_toml_str(bad) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("\nincomplete config rejected: {e}"),
    }
    Ok(())
}
