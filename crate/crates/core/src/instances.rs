//! The named example instances.

use crate::exactlin::FieldSpec;
use crate::flock::{
    flock_abelian_group_algebra, flock_codiscrete, flock_point, flock_product, FlockDatum, FlockError, GroupTable,
    GroupTransport, HeapTable,
};

pub const NAMES: [&str; 6] = ["point", "c2", "c3", "g2", "g3", "c2xg2"];

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("unknown instance '{0}' (expected one of: {names})", names = NAMES.join(", "))]
    Unknown(String),
    #[error(transparent)]
    Flock(#[from] FlockError),
}

/// The field each instance is built over unless another is asked for.
pub fn default_field(name: &str) -> FieldSpec {
    let p = if name == "g3" { 7 } else { 5 };
    FieldSpec::prime(p).expect("small prime")
}

/// The group behind a group-algebra instance, if any.
pub fn group(name: &str) -> Option<GroupTable> {
    match name {
        "g2" | "c2xg2" => Some(GroupTable::cyclic(2)),
        "g3" => Some(GroupTable::cyclic(3)),
        _ => None,
    }
}

pub fn build(name: &str, field: Option<FieldSpec>) -> Result<FlockDatum, InstanceError> {
    let k = field.unwrap_or_else(|| default_field(name));
    let codiscrete = |n| flock_codiscrete(&HeapTable::affine_cyclic(n), k);
    let algebra = |n| flock_abelian_group_algebra(&GroupTable::cyclic(n), k, GroupTransport::Product);
    Ok(match name {
        "point" => flock_point(k),
        "c2" => codiscrete(2)?,
        "c3" => codiscrete(3)?,
        "g2" => algebra(2)?,
        "g3" => algebra(3)?,
        "c2xg2" => flock_product(&codiscrete(2)?, &algebra(2)?)?,
        other => return Err(InstanceError::Unknown(other.into())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let c2 = build("c2", None).unwrap();
        assert_eq!(c2.n(), 2);
        assert!((0..4).all(|i| c2.category().homdim(i / 2, i % 2) == 1));
        let g2 = build("g2", None).unwrap();
        assert_eq!((g2.n(), g2.category().homdim(0, 0)), (1, 2));
        assert_eq!(build("g3", None).unwrap().field(), FieldSpec::prime(7).unwrap());
        assert_eq!(build("c2xg2", None).unwrap().n(), 2);
        assert!(matches!(build("nosuch", None), Err(InstanceError::Unknown(_))));
    }
}
