//! Turn a sparse, unbalanced bipartite graph into the square weight matrix
//! the solver works on, then read one back from an edge-list file.
//!
//! ```bash
//! cargo run --example reduce_graph
//! ```

use rqps::instance::{format_matrix, parse_graph, reduce};
use rqps::{BipartiteGraph, Edge};

fn main() -> rqps::Result<()> {
    // Two left vertices, three right ones; the negative edge is dropped.
    let graph = BipartiteGraph::new(
        2,
        3,
        vec![
            Edge { left: 0, right: 0, weight: 4.0 },
            Edge { left: 0, right: 2, weight: 1.5 },
            Edge { left: 1, right: 1, weight: -2.0 },
            Edge { left: 1, right: 2, weight: 3.0 },
        ],
    )?;
    let matrix = reduce(&graph)?;
    println!("reduced to {n}x{n} (dummy row padded):", n = matrix.n());
    print!("{}", format_matrix(&matrix));

    let text = "# left right\n3 3\n0 1 2.5\n1 0 1.0\n2 2 7.0\n";
    let parsed = reduce(&parse_graph(text, "inline.txt".as_ref())?)?;
    println!("\nparsed edge list:");
    print!("{}", format_matrix(&parsed));

    match parse_graph("2 2\n0 5 1.0\n", "broken.txt".as_ref()) {
        Err(e) => println!("\nrejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
