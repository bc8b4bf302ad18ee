//! Peak current mode buck with an outer voltage loop: the loop's ripple
//! contribution and the largest proportional gain.

use cmc_fsi::config::ConverterConfig;
use cmc_fsi::stability::{kp_limit, pcmc_min_ramp, pcmc_voltage_index_from_gain, pcmc_voltage_verdict, voltage_loop_mv};
use cmc_fsi::VoltageLoop;

const BUCK: &str = r#"
topology = "buck"
scheme = "pcmc"
v_s = 12.0
v_o = 5.0
f_s = 100000.0
l = 0.00001
c = 0.0001
r = 1.0
r_c = 0.01
r_s = 0.1
v_m = 0.5
voltage_loop = "proportional"
k_p = 2.0
"#;

fn main() -> cmc_fsi::Result<()> {
    let mut cfg = ConverterConfig::from_toml_str(BUCK)?;
    println!("{}", cfg.summary());
    println!("open-loop ramp requirement S = {:.1} V/s", pcmc_min_ramp(&cfg)?.required_ramp_slope);

    for k_p in [1.0, 4.0, 8.0] {
        cfg.voltage_loop = VoltageLoop::Proportional { k_p };
        let v = pcmc_voltage_verdict(&cfg)?;
        println!(
            "k_p={k_p:>5}: m_v={:.1} V/s index={:.6} (from full gain {:.6}) stable={}",
            voltage_loop_mv(&cfg)?,
            v.index,
            pcmc_voltage_index_from_gain(&cfg)?,
            v.stable
        );
    }
    println!("k_p limit = {}", kp_limit(&cfg)?);

    cfg.voltage_loop = VoltageLoop::Pi { k_c: 2.0e5, omega_z: 1.0e4 };
    println!("PI loop: m_v={:.1} V/s", voltage_loop_mv(&cfg)?);
    cfg.voltage_loop = VoltageLoop::Type2 { k_c: 2.0e5, omega_z: 1.0e4, omega_p: 3.0e5 };
    println!("type-II loop: m_v={:.1} V/s", voltage_loop_mv(&cfg)?);
    Ok(())
}
