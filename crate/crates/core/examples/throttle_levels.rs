//! Power and cooling of each throttle state for a 5 kW, EER 10 unit.

use ac_drm::model::{cooling_btu_per_hr, kw_thermal_to_tons};
use ac_drm::{cooling_capacity, throttle_power};

fn main() -> ac_drm::Result<()> {
    let rated = 5.0;
    let eer = 10.0;
    for k_states in [2u16, 3, 5] {
        println!("K = {k_states}");
        for k in 1..=k_states {
            let p = throttle_power(k, k_states, rated)?;
            let btu = cooling_btu_per_hr(eer, p)?;
            let tons = kw_thermal_to_tons(cooling_capacity(eer, p)?);
            println!("  state {k}: {p:5.2} kW  {btu:8.0} BTU/hr  {tons:4.2} t");
        }
    }
    Ok(())
}
