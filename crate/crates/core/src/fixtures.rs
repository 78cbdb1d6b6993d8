//! Small named causalities used throughout the test suites and the CLI.

use crate::order::Causality;

/// `a ⪯ b ⪯ c`.
pub fn chain3() -> Causality {
    Causality::from_pairs(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).expect("valid fixture")
}

/// `p ⪯ q, r ⪯ s` with `q ∥ r`.
pub fn diamond4() -> Causality {
    Causality::from_pairs(
        &["p", "q", "r", "s"],
        &[("p", "q"), ("p", "r"), ("q", "s"), ("r", "s")],
    )
    .expect("valid fixture")
}

/// The five events `(0,0), (±1,±1)` of 1+1 Minkowski space, `(t, x)`
/// coordinates, under the causal order: both past events below the origin,
/// the origin below both future events.
pub fn l5() -> Causality {
    Causality::from_pairs(
        &["(-1,-1)", "(-1,1)", "(0,0)", "(1,-1)", "(1,1)"],
        &[
            ("(-1,-1)", "(0,0)"),
            ("(-1,1)", "(0,0)"),
            ("(0,0)", "(1,-1)"),
            ("(0,0)", "(1,1)"),
        ],
    )
    .expect("valid fixture")
}

/// Product order on `{0, .., rows-1} × {0, .., cols-1}`, points `(u,v)` in
/// row-major order. This is the integer lattice of 1+1 Minkowski space in
/// light-cone coordinates.
pub fn product_lattice(rows: usize, cols: usize) -> Causality {
    let coords: Vec<(usize, usize)> = (0..rows)
        .flat_map(|u| (0..cols).map(move |v| (u, v)))
        .collect();
    let points = coords.iter().map(|(u, v)| format!("({u},{v})")).collect();
    Causality::from_predicate(points, |i, j| {
        coords[i].0 <= coords[j].0 && coords[i].1 <= coords[j].1
    })
    .expect("product orders are partial orders")
}

/// The 3×3 product lattice.
pub fn l33() -> Causality {
    product_lattice(3, 3)
}

pub fn antichain(n: usize) -> Causality {
    Causality::from_predicate((0..n).map(|i| format!("x{i}")).collect(), |i, j| i == j)
        .expect("discrete order")
}

/// A total order on `n` points.
pub fn chain(n: usize) -> Causality {
    Causality::from_predicate((0..n).map(|i| format!("c{i}")).collect(), |i, j| i <= j)
        .expect("total order")
}

/// Looks a fixture up by name; used by the CLI.
pub fn by_name(name: &str) -> Option<Causality> {
    match name.to_ascii_lowercase().as_str() {
        "chain3" => Some(chain3()),
        "diamond4" => Some(diamond4()),
        "l5" => Some(l5()),
        "l33" => Some(l33()),
        _ => None,
    }
}

fn from_matrix(rows: &[[u8; 7]; 7]) -> Causality {
    Causality::from_predicate((0..7).map(|i| format!("v{i}")).collect(), |i, j| rows[i][j] == 1)
        .expect("valid fixture")
}

/// Seven points where the ribbon over `v1` has a pair with a cut admitting no
/// ribboned refinement.
pub fn non_dense7() -> Causality {
    from_matrix(&[
        [1, 1, 0, 0, 0, 1, 1],
        [0, 1, 0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 1, 0],
        [0, 0, 0, 0, 1, 1, 0],
        [0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 1],
    ])
}

/// Seven points where two ribbon pairs over `v2` have plain unions meeting in
/// `{v2}` but causal unions meeting in `{v2, v3}`.
pub fn overlapping_unions7() -> Causality {
    from_matrix(&[
        [1, 0, 1, 1, 1, 1, 1],
        [0, 1, 0, 1, 1, 1, 1],
        [0, 0, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 0, 1],
        [0, 0, 0, 0, 1, 0, 1],
        [0, 0, 0, 0, 0, 1, 1],
        [0, 0, 0, 0, 0, 0, 1],
    ])
}
