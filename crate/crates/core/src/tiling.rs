//! Tile sets, brute-force tiling search over truncated regions, and the
//! formula generators that encode tiling problems as trace-set
//! satisfiability.
//!
//! Two generators are provided. [`gen_quadrant_formula`] targets tilings of
//! the full positive quadrant where a designated tile recurs in column 0;
//! its models need infinitely many traces (one per column). The diagonal
//! variant [`gen_diagonal_formula`] targets the region at or below the
//! diagonal and admits finite truncated models, with traces of shape
//! `tiles.. x-marked-tile null^ω`.
//!
//! Diagonal sub-schema map (one named conjunct per clause of the variant):
//!
//! | conjunct | meaning |
//! |----------|---------|
//! | `d1` | every trace carries `x` exactly once (its column index) |
//! | `d2` | some trace carries `x` at time 0 (a column exists) |
//! | `d3` | traces with the same `x` position agree on all tiles |
//! | `d4` | every point carries exactly one of the tiles or `null` |
//! | `d5` | vertical matching at every point strictly before `x` |
//! | `d6` | horizontal matching at every point up to and including `x` of the left column |
//! | `d7` | some trace carries the designated tile at every represented row |
//! | `d8` | real tiles up to and including `x`, then `null` forever |
//!
//! `null` is exclusive with the tiles (via `d4`) and forbidden at or
//! before the `x` position (via `d8`); `x` itself co-occurs with a real
//! tile. The quadrant schema's next-column clause (for every column there
//! is a column one step further right) is deliberately not part of the
//! diagonal variant: it forces infinite models, while the diagonal
//! generator's models are exactly the finite truncations validated by
//! [`check_partial_diagonal`].

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::trace::{Alphabet, Labels, TraceSet, UpTrace};
use std::collections::BTreeMap;

/// One tile: colors on the four sides, as indices into the palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub east: usize,
    pub west: usize,
    pub north: usize,
    pub south: usize,
}

/// A finite nonempty tile list with a designated tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileSet {
    colors: Vec<String>,
    tiles: Vec<Tile>,
    designated: usize,
}

impl TileSet {
    pub fn new(colors: Vec<String>, tiles: Vec<Tile>, designated: usize) -> Result<Self> {
        if tiles.is_empty() {
            return Err(Error::InvalidInput("tile set must be nonempty".to_string()));
        }
        if designated >= tiles.len() {
            return Err(Error::InvalidInput(
                "designated tile index out of range".to_string(),
            ));
        }
        for (i, t) in tiles.iter().enumerate() {
            for side in [t.east, t.west, t.north, t.south] {
                if side >= colors.len() {
                    return Err(Error::InvalidInput(format!(
                        "tile {i} uses an unknown color"
                    )));
                }
            }
            if tiles[..i].contains(t) {
                return Err(Error::InvalidInput(format!(
                    "tile {i} duplicates an earlier tile"
                )));
            }
        }
        Ok(TileSet {
            colors,
            tiles,
            designated,
        })
    }

    /// The one-tile set whose single tile has the same color on all sides.
    pub fn constant(color: impl Into<String>) -> Self {
        TileSet {
            colors: vec![color.into()],
            tiles: vec![Tile {
                east: 0,
                west: 0,
                north: 0,
                south: 0,
            }],
            designated: 0,
        }
    }

    pub fn colors(&self) -> &[String] {
        &self.colors
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn designated(&self) -> usize {
        self.designated
    }

    /// Proposition name for tile `i`.
    pub fn prop(&self, i: usize) -> String {
        format!("t{i}")
    }

    /// `{x} ∪ tile propositions`, plus `null` when asked.
    pub fn alphabet(&self, with_null: bool) -> Alphabet {
        let mut props: Vec<String> = (0..self.tiles.len()).map(|i| self.prop(i)).collect();
        props.push("x".to_string());
        if with_null {
            props.push("null".to_string());
        }
        Alphabet::new(props).expect("small alphabet")
    }

    fn vertical_partners(&self, tile: usize) -> Vec<usize> {
        (0..self.tiles.len())
            .filter(|&u| self.tiles[tile].north == self.tiles[u].south)
            .collect()
    }

    fn horizontal_partners(&self, tile: usize) -> Vec<usize> {
        (0..self.tiles.len())
            .filter(|&u| self.tiles[tile].east == self.tiles[u].west)
            .collect()
    }
}

fn x(var: &str) -> Formula {
    Formula::atom("x", var)
}

fn tile_atom(ts: &TileSet, tile: usize, var: &str) -> Formula {
    Formula::atom(ts.prop(tile), var)
}

/// Exactly one proposition from `props` holds, as a disjunction over the
/// chosen one.
fn exactly_one(props: &[String], var: &str) -> Formula {
    Formula::disj(props.iter().enumerate().map(|(i, p)| {
        Formula::conj(
            std::iter::once(Formula::atom(p.clone(), var)).chain(
                props
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, q)| Formula::not(Formula::atom(q.clone(), var))),
            ),
        )
    }))
}

/// The seven conjuncts of the quadrant encoding, in order.
pub fn quadrant_parts(ts: &TileSet) -> Vec<Formula> {
    let tiles: Vec<usize> = (0..ts.tiles().len()).collect();

    // 1: every trace has exactly one x point
    let p1 = Formula::forall(
        "p",
        Formula::until(
            Formula::not(x("p")),
            Formula::and(
                x("p"),
                Formula::next(Formula::globally(Formula::not(x("p")))),
            ),
        ),
    );

    // 2: x at time 0 exists, and every column has a next column
    let p2 = Formula::and(
        Formula::exists("p", x("p")),
        Formula::forall(
            "p1",
            Formula::exists(
                "p2",
                Formula::eventually(Formula::and(x("p1"), Formula::next(x("p2")))),
            ),
        ),
    );

    // 3: same x position implies same tiles everywhere
    let p3 = Formula::forall(
        "p1",
        Formula::forall(
            "p2",
            Formula::implies(
                Formula::eventually(Formula::and(x("p1"), x("p2"))),
                Formula::globally(Formula::conj(
                    tiles
                        .iter()
                        .map(|&t| Formula::iff(tile_atom(ts, t, "p1"), tile_atom(ts, t, "p2"))),
                )),
            ),
        ),
    );

    // 4: exactly one tile per point
    let tile_props: Vec<String> = tiles.iter().map(|&t| ts.prop(t)).collect();
    let p4 = Formula::forall("p", Formula::globally(exactly_one(&tile_props, "p")));

    // 5: vertical neighbors match
    let p5 = Formula::forall(
        "p",
        Formula::globally(Formula::disj(tiles.iter().map(|&t| {
            Formula::and(
                tile_atom(ts, t, "p"),
                Formula::disj(
                    ts.vertical_partners(t)
                        .into_iter()
                        .map(|u| Formula::next(tile_atom(ts, u, "p"))),
                ),
            )
        }))),
    );

    // 6: horizontal neighbors match
    let p6 = Formula::forall(
        "p1",
        Formula::forall(
            "p2",
            Formula::implies(
                Formula::eventually(Formula::and(x("p1"), Formula::next(x("p2")))),
                Formula::globally(Formula::disj(tiles.iter().map(|&t| {
                    Formula::and(
                        tile_atom(ts, t, "p1"),
                        Formula::disj(
                            ts.horizontal_partners(t)
                                .into_iter()
                                .map(|u| tile_atom(ts, u, "p2")),
                        ),
                    )
                }))),
            ),
        ),
    );

    // 7: the designated tile recurs in column 0
    let p7 = Formula::exists(
        "p",
        Formula::and(
            x("p"),
            Formula::globally(Formula::eventually(tile_atom(ts, ts.designated(), "p"))),
        ),
    );

    vec![p1, p2, p3, p4, p5, p6, p7]
}

/// Conjunction of the seven quadrant conjuncts.
pub fn gen_quadrant_formula(ts: &TileSet) -> Formula {
    Formula::conj(quadrant_parts(ts))
}

/// The eight conjuncts of the diagonal encoding (see the module docs for
/// the sub-schema map).
pub fn diagonal_parts(ts: &TileSet) -> Vec<Formula> {
    let tiles: Vec<usize> = (0..ts.tiles().len()).collect();

    let d1 = Formula::forall(
        "p",
        Formula::until(
            Formula::not(x("p")),
            Formula::and(
                x("p"),
                Formula::next(Formula::globally(Formula::not(x("p")))),
            ),
        ),
    );

    let d2 = Formula::exists("p", x("p"));

    let d3 = Formula::forall(
        "p1",
        Formula::forall(
            "p2",
            Formula::implies(
                Formula::eventually(Formula::and(x("p1"), x("p2"))),
                Formula::globally(Formula::conj(
                    tiles
                        .iter()
                        .map(|&t| Formula::iff(tile_atom(ts, t, "p1"), tile_atom(ts, t, "p2"))),
                )),
            ),
        ),
    );

    let mut tile_or_null: Vec<String> = tiles.iter().map(|&t| ts.prop(t)).collect();
    tile_or_null.push("null".to_string());
    let d4 = Formula::forall("p", Formula::globally(exactly_one(&tile_or_null, "p")));

    let vmatch = Formula::disj(tiles.iter().map(|&t| {
        Formula::and(
            tile_atom(ts, t, "p"),
            Formula::disj(
                ts.vertical_partners(t)
                    .into_iter()
                    .map(|u| Formula::next(tile_atom(ts, u, "p"))),
            ),
        )
    }));
    let d5 = Formula::forall("p", Formula::until(vmatch, x("p")));

    let hmatch = Formula::disj(tiles.iter().map(|&t| {
        Formula::and(
            tile_atom(ts, t, "p1"),
            Formula::disj(
                ts.horizontal_partners(t)
                    .into_iter()
                    .map(|u| tile_atom(ts, u, "p2")),
            ),
        )
    }));
    let d6 = Formula::forall(
        "p1",
        Formula::forall(
            "p2",
            Formula::implies(
                Formula::eventually(Formula::and(x("p1"), Formula::next(x("p2")))),
                Formula::until(
                    Formula::and(hmatch.clone(), Formula::not(x("p1"))),
                    Formula::and(hmatch, x("p1")),
                ),
            ),
        ),
    );

    let d7 = Formula::forall(
        "p1",
        Formula::exists(
            "p2",
            Formula::eventually(Formula::and(x("p1"), tile_atom(ts, ts.designated(), "p2"))),
        ),
    );

    let nl = |v: &str| Formula::atom("null", v);
    let d8 = Formula::forall(
        "p",
        Formula::until(
            Formula::and(Formula::not(nl("p")), Formula::not(x("p"))),
            Formula::conj([
                Formula::not(nl("p")),
                x("p"),
                Formula::next(Formula::globally(nl("p"))),
            ]),
        ),
    );

    vec![d1, d2, d3, d4, d5, d6, d7, d8]
}

/// Conjunction of the eight diagonal conjuncts.
pub fn gen_diagonal_formula(ts: &TileSet) -> Formula {
    Formula::conj(diagonal_parts(ts))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Quadrant,
    Diagonal,
}

/// A tiling of a truncated region; `columns[i][j]` is the tile at column
/// `i`, row `j`. Diagonal truncations have column `i` of height `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingWitness {
    pub region: Region,
    pub columns: Vec<Vec<usize>>,
}

#[derive(Debug, Clone)]
pub struct TilingSearch {
    pub witness: Option<TilingWitness>,
    pub nodes: usize,
}

fn column_height(region: Region, col: usize, n: usize) -> usize {
    match region {
        Region::Quadrant => n,
        Region::Diagonal => col + 1,
    }
}

/// Exhaustive search for a tiling of the size-`n` truncation.
///
/// For the diagonal region the witness additionally places the designated
/// tile on every row (at its own column or later).
pub fn brute_tiling(
    ts: &TileSet,
    region: Region,
    n: usize,
    node_cap: usize,
) -> Result<TilingSearch> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "truncation size must be at least 1".to_string(),
        ));
    }
    let cells: Vec<(usize, usize)> = (0..n)
        .flat_map(|col| (0..column_height(region, col, n)).map(move |row| (col, row)))
        .collect();
    let mut grid: Vec<Vec<usize>> = (0..n)
        .map(|col| vec![usize::MAX; column_height(region, col, n)])
        .collect();
    let mut nodes = 0usize;

    fn fits(ts: &TileSet, grid: &[Vec<usize>], col: usize, row: usize, tile: usize) -> bool {
        if row > 0 {
            let below = grid[col][row - 1];
            if ts.tiles()[below].north != ts.tiles()[tile].south {
                return false;
            }
        }
        if col > 0 && row < grid[col - 1].len() {
            let west = grid[col - 1][row];
            if ts.tiles()[west].east != ts.tiles()[tile].west {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        ts: &TileSet,
        region: Region,
        cells: &[(usize, usize)],
        grid: &mut Vec<Vec<usize>>,
        next: usize,
        nodes: &mut usize,
        node_cap: usize,
    ) -> Result<bool> {
        if next == cells.len() {
            if region == Region::Diagonal {
                let n = grid.len();
                for row in 0..n {
                    if !(row..n).any(|col| grid[col][row] == ts.designated()) {
                        return Ok(false);
                    }
                }
            }
            return Ok(true);
        }
        let (col, row) = cells[next];
        for tile in 0..ts.tiles().len() {
            *nodes += 1;
            if *nodes > node_cap {
                return Err(Error::ResourceLimit(format!(
                    "tiling search exceeded {node_cap} nodes"
                )));
            }
            if fits(ts, grid, col, row, tile) {
                grid[col][row] = tile;
                if rec(ts, region, cells, grid, next + 1, nodes, node_cap)? {
                    return Ok(true);
                }
                grid[col][row] = usize::MAX;
            }
        }
        Ok(false)
    }

    let found = rec(ts, region, &cells, &mut grid, 0, &mut nodes, node_cap)?;
    Ok(TilingSearch {
        witness: found.then_some(TilingWitness {
            region,
            columns: grid,
        }),
        nodes,
    })
}

/// Adjacency (and, for diagonal witnesses, designated-tile-per-row)
/// validation of a complete truncated witness.
pub fn check_witness(ts: &TileSet, w: &TilingWitness) -> bool {
    let n = w.columns.len();
    for (col, column) in w.columns.iter().enumerate() {
        if column.len() != column_height(w.region, col, n) {
            return false;
        }
        for row in 0..column.len() {
            let tile = column[row];
            if tile >= ts.tiles().len() {
                return false;
            }
            if row + 1 < column.len() && ts.tiles()[tile].north != ts.tiles()[column[row + 1]].south
            {
                return false;
            }
            if col + 1 < n && row < w.columns[col + 1].len() {
                let east = w.columns[col + 1][row];
                if ts.tiles()[tile].east != ts.tiles()[east].west {
                    return false;
                }
            }
        }
    }
    if w.region == Region::Diagonal {
        for row in 0..n {
            if !(row..n).any(|col| w.columns[col][row] == ts.designated()) {
                return false;
            }
        }
    }
    true
}

/// Validates a partial diagonal tiling given as `column index -> tiles of
/// rows 0..=index`: adjacency on present neighbors, and the designated
/// tile at row `i` of some present column for every present column `i`.
pub fn check_partial_diagonal(ts: &TileSet, columns: &BTreeMap<usize, Vec<usize>>) -> bool {
    for (&col, tiles) in columns {
        if tiles.len() != col + 1 {
            return false;
        }
        for row in 0..tiles.len() {
            if tiles[row] >= ts.tiles().len() {
                return false;
            }
            if row + 1 < tiles.len()
                && ts.tiles()[tiles[row]].north != ts.tiles()[tiles[row + 1]].south
            {
                return false;
            }
        }
        if let Some(east) = columns.get(&(col + 1)) {
            for row in 0..tiles.len() {
                if ts.tiles()[tiles[row]].east != ts.tiles()[east[row]].west {
                    return false;
                }
            }
        }
    }
    for &col in columns.keys() {
        let covered = columns
            .iter()
            .any(|(&c, tiles)| c >= col && tiles.get(col) == Some(&ts.designated()));
        if !covered {
            return false;
        }
    }
    true
}

/// Decodes a model of the diagonal formula back into a partial grid: the
/// unique `x` position of each trace is its column index, and positions up
/// to it carry the column's tiles.
pub fn decode_diagonal_model(
    ts: &TileSet,
    model: &TraceSet,
) -> Result<BTreeMap<usize, Vec<usize>>> {
    let alpha = model.alphabet();
    let x_idx = alpha
        .index_of("x")
        .ok_or_else(|| Error::AlphabetMismatch("model lacks the x proposition".to_string()))?;
    let tile_idx: Vec<Option<usize>> = (0..ts.tiles().len())
        .map(|t| alpha.index_of(&ts.prop(t)))
        .collect();
    let mut columns = BTreeMap::new();
    for trace in model.traces() {
        if trace.cycle().iter().any(|l| l.contains(x_idx)) {
            return Err(Error::InvalidInput(
                "trace marks x infinitely often".to_string(),
            ));
        }
        let mut x_pos = None;
        for (pos, l) in trace.stem().iter().enumerate() {
            if l.contains(x_idx) {
                if x_pos.is_some() {
                    return Err(Error::InvalidInput(
                        "trace marks x more than once".to_string(),
                    ));
                }
                x_pos = Some(pos);
            }
        }
        let col = x_pos.ok_or_else(|| Error::InvalidInput("trace never marks x".to_string()))?;
        let mut tiles = Vec::with_capacity(col + 1);
        for row in 0..=col {
            let labels = trace.at(row);
            let mut tile = None;
            for (t, idx) in tile_idx.iter().enumerate() {
                if idx.map(|i| labels.contains(i)).unwrap_or(false) {
                    if tile.is_some() {
                        return Err(Error::InvalidInput(
                            "position carries more than one tile".to_string(),
                        ));
                    }
                    tile = Some(t);
                }
            }
            tiles.push(tile.ok_or_else(|| {
                Error::InvalidInput("position at or before x carries no tile".to_string())
            })?);
        }
        if let Some(previous) = columns.insert(col, tiles.clone()) {
            if previous != tiles {
                return Err(Error::InvalidInput(
                    "two traces of the same column disagree".to_string(),
                ));
            }
        }
    }
    Ok(columns)
}

/// The canonical truncated quadrant model: one trace per column of an
/// `n×n` witness, `x` at position `i` of column `i`, padded by repeating
/// the top row's tile.
pub fn truncated_quadrant_model(ts: &TileSet, witness: &TilingWitness) -> Result<TraceSet> {
    if witness.region != Region::Quadrant {
        return Err(Error::InvalidInput(
            "witness is not a quadrant tiling".to_string(),
        ));
    }
    let alpha = ts.alphabet(false);
    let x_idx = alpha.index_of("x").unwrap();
    let mut traces = Vec::with_capacity(witness.columns.len());
    for (col, tiles) in witness.columns.iter().enumerate() {
        let mut stem = Vec::with_capacity(tiles.len());
        for (row, &tile) in tiles.iter().enumerate() {
            let mut l = Labels::singleton(alpha.index_of(&ts.prop(tile)).unwrap());
            if row == col {
                l.insert(x_idx);
            }
            stem.push(l);
        }
        let top = Labels::singleton(alpha.index_of(&ts.prop(*tiles.last().unwrap())).unwrap());
        traces.push(UpTrace::new(stem, vec![top])?);
    }
    TraceSet::new(alpha, traces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::prenex;
    use crate::syntax::print_formula;
    use crate::trace::eval_hyperltl;

    fn two_color_mismatched() -> TileSet {
        // east colors never match any west color
        TileSet::new(
            vec!["r".to_string(), "g".to_string(), "b".to_string()],
            vec![
                Tile {
                    east: 0,
                    west: 1,
                    north: 2,
                    south: 2,
                },
                Tile {
                    east: 0,
                    west: 2,
                    north: 1,
                    south: 1,
                },
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn quadrant_has_seven_conjuncts() {
        let parts = quadrant_parts(&TileSet::constant("c"));
        assert_eq!(parts.len(), 7);
        let whole = gen_quadrant_formula(&TileSet::constant("c"));
        assert_eq!(whole.top_conjuncts().len(), 7);
    }

    #[test]
    fn phi1_schema_shape() {
        let parts = quadrant_parts(&TileSet::constant("c"));
        assert_eq!(
            print_formula(&parts[0]),
            "forall p. !x[p] U (x[p] & X G !x[p])"
        );
    }

    #[test]
    fn phi2_prenexes_to_pi2() {
        use crate::formula::{classify_prenex, PrefixKind};
        let parts = quadrant_parts(&TileSet::constant("c"));
        let p = prenex(&parts[1]).unwrap();
        let class = classify_prenex(&p).unwrap();
        assert_eq!(
            (class.kind, class.level),
            (PrefixKind::Pi, 2),
            "got {class}"
        );
    }

    #[test]
    fn single_tile_vertical_clause_degenerates() {
        let parts = quadrant_parts(&TileSet::constant("c"));
        assert_eq!(print_formula(&parts[4]), "forall p. G (t0[p] & X t0[p])");
    }

    #[test]
    fn brute_constant_tile() {
        let ts = TileSet::constant("c");
        let r = brute_tiling(&ts, Region::Quadrant, 4, 1_000_000).unwrap();
        let w = r.witness.expect("constant tile tiles everything");
        assert!(check_witness(&ts, &w));
    }

    #[test]
    fn brute_mismatched_tiles_fail_horizontally() {
        let ts = two_color_mismatched();
        let r = brute_tiling(&ts, Region::Quadrant, 2, 1_000_000).unwrap();
        assert!(r.witness.is_none());
        // width 1 is still fine vertically
        let r = brute_tiling(&ts, Region::Quadrant, 1, 1_000_000).unwrap();
        assert!(r.witness.is_some());
    }

    #[test]
    fn diagonal_witness_has_designated_every_row() {
        let ts = TileSet::constant("c");
        let r = brute_tiling(&ts, Region::Diagonal, 3, 1_000_000).unwrap();
        let w = r.witness.unwrap();
        assert!(check_witness(&ts, &w));
        for row in 0..3 {
            assert!((row..3).any(|col| w.columns[col][row] == ts.designated()));
        }
    }

    #[test]
    fn truncated_model_conjunct_pattern() {
        let ts = TileSet::constant("c");
        for n in 1..=3 {
            let w = brute_tiling(&ts, Region::Quadrant, n, 1_000_000)
                .unwrap()
                .witness
                .unwrap();
            let model = truncated_quadrant_model(&ts, &w).unwrap();
            let parts = quadrant_parts(&ts);
            let values: Vec<bool> = parts
                .iter()
                .map(|p| eval_hyperltl(&model, &prenex(p).unwrap()).unwrap())
                .collect();
            assert_eq!(
                values,
                vec![true, false, true, true, true, true, true],
                "pattern at n = {n}"
            );
        }
    }

    #[test]
    fn diagonal_formula_mentions_null() {
        let f = gen_diagonal_formula(&TileSet::constant("c"));
        assert!(f.propositions().contains("null"));
        assert_eq!(diagonal_parts(&TileSet::constant("c")).len(), 8);
    }

    #[test]
    fn decode_rejects_multiple_x() {
        let ts = TileSet::constant("c");
        let alpha = ts.alphabet(true);
        let l = |ls: &[&str]| alpha.labels(ls).unwrap();
        let bad = TraceSet::new(
            alpha.clone(),
            vec![UpTrace::new(vec![l(&["t0", "x"]), l(&["t0", "x"])], vec![l(&["null"])]).unwrap()],
        )
        .unwrap();
        assert!(decode_diagonal_model(&ts, &bad).is_err());
    }

    #[test]
    fn hand_built_diagonal_model_satisfies_formula_and_decodes() {
        let ts = TileSet::constant("c");
        let alpha = ts.alphabet(true);
        let l = |ls: &[&str]| alpha.labels(ls).unwrap();
        // columns 0 and 1
        let c0 = UpTrace::new(vec![l(&["t0", "x"])], vec![l(&["null"])]).unwrap();
        let c1 = UpTrace::new(vec![l(&["t0"]), l(&["t0", "x"])], vec![l(&["null"])]).unwrap();
        let model = TraceSet::new(alpha, vec![c0, c1]).unwrap();
        let f = prenex(&gen_diagonal_formula(&ts)).unwrap();
        assert!(eval_hyperltl(&model, &f).unwrap());
        let grid = decode_diagonal_model(&ts, &model).unwrap();
        assert!(check_partial_diagonal(&ts, &grid));
        assert_eq!(grid.len(), 2);
    }
}
