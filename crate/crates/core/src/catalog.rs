//! Named structures shared by the CLI and the self-test.

use crate::error::{Error, Result};
use crate::fieldexpr::ScalarField;
use crate::ma4::{self, MaStructure4};
use crate::ma6::{self, EulerPair6, MaStructure6};

pub const NAMES: [&str; 5] = ["euler2d", "hess1", "speciallag", "burgers-cy", "euler3d-pair"];

#[derive(Debug, Clone)]
pub enum Entry {
    Four(MaStructure4),
    Six(MaStructure6),
    Pair(EulerPair6),
}

/// One-line description of a catalog entry.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "euler2d" => "2D Euler: Ω = dx1∧du2 + du1∧dx2, ω = du1∧du2 − a dx1∧dx2, a = Δp/2",
        "hess1" => "hess(φ) = 1: ω = dξ1∧dξ2∧dξ3 − dx1∧dx2∧dx3",
        "speciallag" => "special Lagrangian: Im Π(dx_k + i dξ_k)",
        "burgers-cy" => "Burgers real Calabi-Yau: ϖ = dξ1∧dξ2∧dx3 − a dx1∧dx2∧dx3 + dx1∧dx2∧dξ3",
        "euler3d-pair" => "3D Euler pair (ω, θ), Δp = 2a; symmetry group of (Ω, ω, θ) is SO(3)",
        _ => return None,
    })
}

/// Entries that take `a` default to `a = 1`.
pub fn lookup(name: &str, a: Option<&ScalarField>) -> Result<Entry> {
    let default = ScalarField::constant(&ma4::plane_chart(), 1.0);
    let a = a.unwrap_or(&default);
    Ok(match name {
        "euler2d" => Entry::Four(MaStructure4::euler(a)?),
        "hess1" => Entry::Six(ma6::hess1()),
        "speciallag" => Entry::Six(ma6::special_lagrangian()),
        "burgers-cy" => Entry::Six(ma6::burgers_cy(a)?),
        "euler3d-pair" => Entry::Pair(EulerPair6::new(a)?),
        _ => return Err(Error::Invalid(format!("unknown structure `{name}`; known: {}", NAMES.join(", ")))),
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn every_name_resolves() {
        for n in super::NAMES {
            assert!(super::lookup(n, None).is_ok());
            assert!(super::describe(n).is_some());
        }
        assert!(super::lookup("nope", None).is_err());
    }
}
