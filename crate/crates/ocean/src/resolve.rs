//! Mapping feature-set names or identifier lists onto matrix positions.

use ocean_core::{PreparedState, TwoWaySelection};

use crate::error::{Error, Result};
use crate::gmt::FeatureSetCollection;

/// One side of a two-way selection as given by the user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetSpec {
    /// A set looked up in a collection.
    Named(String),
    /// An explicit list of feature identifiers.
    Ids(Vec<String>),
}

/// One resolved axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedAxis {
    pub name: String,
    /// Sorted, distinct matrix positions.
    pub indices: Vec<usize>,
    /// Members absent from the matrix.
    pub dropped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedSelection {
    pub rows: ResolvedAxis,
    pub cols: ResolvedAxis,
    pub selection: TwoWaySelection,
}

/// Resolves one axis against a position lookup.
pub fn resolve_axis(
    spec: &SetSpec,
    collection: Option<&FeatureSetCollection>,
    position: impl Fn(&str) -> Option<usize>,
) -> Result<ResolvedAxis> {
    let (name, members): (String, &[String]) = match spec {
        SetSpec::Named(name) => {
            let set = collection
                .and_then(|c| c.get(name))
                .ok_or_else(|| Error::UnknownSet(name.clone()))?;
            (name.clone(), &set.members)
        }
        SetSpec::Ids(ids) => ("<ids>".to_string(), ids),
    };
    let mut indices: Vec<usize> = members.iter().filter_map(|m| position(m)).collect();
    indices.sort_unstable();
    indices.dedup();
    let dropped = members.len() - members.iter().filter(|m| position(m).is_some()).count();
    if indices.is_empty() {
        return Err(Error::UnmatchedSet(name));
    }
    if dropped > 0 {
        log::warn!(
            "{name}: {dropped} of {} members are not in the matrix and were dropped",
            members.len()
        );
    }
    Ok(ResolvedAxis {
        name,
        indices,
        dropped,
    })
}

/// Resolves a row spec against the state's row identifiers and a column spec
/// against its column identifiers.
pub fn resolve_selection(
    state: &PreparedState,
    row_spec: &SetSpec,
    col_spec: &SetSpec,
    row_sets: Option<&FeatureSetCollection>,
    col_sets: Option<&FeatureSetCollection>,
) -> Result<ResolvedSelection> {
    let rows = resolve_axis(row_spec, row_sets, |id| state.row_position(id))?;
    let cols = resolve_axis(col_spec, col_sets, |id| state.col_position(id))?;
    let selection = TwoWaySelection::for_state(state, rows.indices.clone(), cols.indices.clone())?;
    Ok(ResolvedSelection {
        rows,
        cols,
        selection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmt::parse_gmt_from;
    use ocean_core::{prepare, Alpha, AssociationMatrix};

    fn state() -> PreparedState {
        let ids = |p: &str, n: usize| (0..n).map(|i| format!("{p}{i}")).collect::<Vec<_>>();
        let m = AssociationMatrix::new(ids("r", 5), ids("c", 3), vec![0.5; 15]).unwrap();
        prepare(&m, Alpha::new(0.05).unwrap()).unwrap()
    }

    #[test]
    fn complete_partial_and_empty_sets() {
        let st = state();
        let gmt = "all\t\tr4\tr0\tr2\npart\t\tr1\tx\tr3\ty\tz\nnone\t\tx\ty\n";
        let rows = parse_gmt_from(gmt.as_bytes(), "g").unwrap();
        let cols = SetSpec::Ids(vec!["c0".into(), "c2".into()]);

        let r = resolve_selection(&st, &SetSpec::Named("all".into()), &cols, Some(&rows), None)
            .unwrap();
        assert_eq!(r.rows.indices, [0, 2, 4]);
        assert_eq!(r.rows.dropped, 0);
        assert_eq!(r.selection.size(), 6);

        let r = resolve_selection(
            &st,
            &SetSpec::Named("part".into()),
            &cols,
            Some(&rows),
            None,
        )
        .unwrap();
        assert_eq!(r.rows.indices, [1, 3]);
        assert_eq!(r.rows.dropped, 3);

        let err = resolve_selection(
            &st,
            &SetSpec::Named("none".into()),
            &cols,
            Some(&rows),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnmatchedSet(_)));
        let err = resolve_selection(
            &st,
            &SetSpec::Named("nope".into()),
            &cols,
            Some(&rows),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownSet(_)));
    }
}
