use super::DirectedGraph;

/// Strongly connected components of `g`.
///
/// The partition is returned in reverse topological order of the SCC
/// condensation (targets before sources), with each component sorted
/// ascending. The walk visits roots and successors in ascending id, so the
/// output is identical across calls.
pub fn strongly_connected_components(g: &DirectedGraph) -> Vec<Vec<u32>> {
    let n = g.vertex_count() as usize;
    let mut adj: Vec<&[u32]> = Vec::with_capacity(n);
    for v in g.vertices() {
        adj.push(g.successors(v));
    }
    tarjan(n, |v| adj[v])
}

/// Iterative Tarjan over an adjacency callback; shared by the public entry
/// point and the scratch graphs of the top-down WPO construction.
pub(crate) fn tarjan<'a, F>(n: usize, succs: F) -> Vec<Vec<u32>>
where
    F: Fn(usize) -> &'a [u32],
{
    const UNVISITED: u32 = u32::MAX;
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next = 0u32;
    let mut result: Vec<Vec<u32>> = Vec::new();
    // Frame: (vertex, next successor position).
    let mut frames: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        frames.push((root, 0));
        index[root as usize] = next;
        lowlink[root as usize] = next;
        next += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut i)) = frames.last_mut() {
            let vs = succs(v as usize);
            if *i < vs.len() {
                let w = vs[*i];
                *i += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next;
                    lowlink[w as usize] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    frames.push((w, 0));
                } else if on_stack[w as usize] {
                    lowlink[v as usize] = lowlink[v as usize].min(index[w as usize]);
                }
            } else {
                frames.pop();
                if let Some(&(p, _)) = frames.last() {
                    lowlink[p as usize] = lowlink[p as usize].min(lowlink[v as usize]);
                }
                if lowlink[v as usize] == index[v as usize] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    result.push(comp);
                }
            }
        }
    }
    result
}
