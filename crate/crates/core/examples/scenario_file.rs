//! Print the built-in intersection scenario and the obstacle corridor as TOML,
//! the format accepted by `crossroads --scenario`.

use crossroads::sim::{CorridorScenario, Scenario};

fn main() -> crossroads::Result<()> {
    println!("# intersection scenario\n{}", Scenario::default().to_toml()?);
    let corridor = toml::to_string(&CorridorScenario::default())
        .map_err(|e| crossroads::Error::Serialize(e.to_string()))?;
    println!("# corridor scenario\n{corridor}");
    Ok(())
}
