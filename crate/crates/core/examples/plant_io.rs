//! Seeded plant generation and the JSON formats shared with the CLI.

use musynth::lti;
use musynth::musyn::io::{plant_from_json, plant_to_json, policy_from_json, policy_to_json};
use musynth::musyn::{default_init, random_plant, ChannelDims};

fn main() -> musynth::Result<()> {
    let dims = ChannelDims { n_w: 1, n_d: 1, n_u: 1, n_v: 1, n_e: 1, n_y: 1 };
    let plant = random_plant(3, dims, 0.9, 42)?;
    println!("spectral radius {:.12}", lti::spectral_radius(plant.sys())?);

    let text = plant_to_json(&plant, true)?;
    println!("{text}");
    let back = plant_from_json(&text)?;
    println!("plant round trip exact: {}", back == plant);
    println!("same seed, same plant: {}", random_plant(3, dims, 0.9, 42)? == plant);

    let policy = default_init(&plant, 2, 1)?;
    let ptext = policy_to_json(&policy)?;
    println!("initial policy: {ptext}");
    println!("policy round trip exact: {}", policy_from_json(&ptext)? == policy);
    Ok(())
}
