//! Bourdoncle's sequential recursive iteration strategy over a WTO.

use super::{iteration_cap, ValueMap};
use crate::domain::{AbstractDomain, Env, EquationSystem};
use crate::wpo::WpoNodeId;
use crate::wto::Wto;
use std::collections::HashMap;

/// Solves the system by walking the total order once; on reaching a component
/// head the component body is re-iterated until recomputing the head no
/// longer changes it, with widening applied at the head.
pub fn solve_sequential(sys: &EquationSystem, wto: &Wto) -> ValueMap {
    debug_assert_eq!(sys.graph().vertex_count(), wto.base().vertex_count());
    let mut values = vec![Env::Bottom; sys.graph().vertex_count() as usize];
    // Order position of each component's exit, keyed by its head's position.
    let exit_pos: HashMap<usize, usize> = wto
        .base()
        .component_heads()
        .into_iter()
        .map(|h| {
            let hp = wto
                .position(WpoNodeId::Plain(h))
                .expect("head is in the order");
            let xp = wto
                .position(WpoNodeId::Exit(h))
                .expect("exit is in the order");
            (hp, xp)
        })
        .collect();
    run(sys, wto, &exit_pos, &mut values, 0, wto.order().len());
    ValueMap::new(values)
}

fn run(
    sys: &EquationSystem,
    wto: &Wto,
    exit_pos: &HashMap<usize, usize>,
    values: &mut [Env],
    mut at: usize,
    end: usize,
) {
    while at < end {
        let WpoNodeId::Plain(v) = wto.order()[at] else {
            unreachable!("exits are consumed by their component's head");
        };
        match exit_pos.get(&at) {
            None => {
                values[v as usize] = sys.apply(v, values);
                at += 1;
            }
            Some(&exit) => {
                let mut rounds = 0u32;
                loop {
                    values[v as usize] = values[v as usize].widen(&sys.apply(v, values));
                    run(sys, wto, exit_pos, values, at + 1, exit);
                    if sys.apply(v, values).leq(&values[v as usize]) {
                        break;
                    }
                    rounds += 1;
                    assert!(
                        rounds <= iteration_cap(sys.num_vars()),
                        "component at head {v} failed to stabilize"
                    );
                }
                at = exit + 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Bound, Interval};
    use crate::graph::depth_first_forest;
    use crate::wto::construct_wto_bu;

    use crate::fixpoint::testsys::counter_program;

    #[test]
    fn counter_program_fixpoint() {
        let sys = counter_program();
        let f = depth_first_forest(sys.graph());
        let wto = construct_wto_bu(sys.graph(), &f);
        let result = solve_sequential(&sys, &wto);
        assert_eq!(
            result.get(7).get(0),
            Interval::Range(Bound::Finite(0), Bound::PosInf),
            "exit sees [0,+inf]"
        );
        assert_eq!(result.get(0), &Env::top(1));
        assert_eq!(result.get(1).get(0), Interval::finite(0, 0));
        assert_eq!(result.get(8).get(0), Interval::finite(1, 1));
        assert_eq!(
            result.get(2).get(0),
            Interval::Range(Bound::Finite(0), Bound::PosInf)
        );
    }

    #[test]
    fn straight_line_is_exact() {
        let sys = EquationSystem::parse(
            "vars x\nentry 0\nnode 0: x = 0\nnode 1: x = x + 1\nnode 2: x = x + 1\nedge 0 1\nedge 1 2\n",
        )
        .unwrap();
        let f = depth_first_forest(sys.graph());
        let wto = construct_wto_bu(sys.graph(), &f);
        let result = solve_sequential(&sys, &wto);
        assert_eq!(result.get(0).get(0), Interval::finite(0, 0));
        assert_eq!(result.get(1).get(0), Interval::finite(1, 1));
        assert_eq!(result.get(2).get(0), Interval::finite(2, 2));
    }

    #[test]
    fn unreachable_vertices_stay_bottom() {
        let sys =
            EquationSystem::parse("vars x\nentry 0\nnode 3: x = 7\nedge 0 1\nedge 3 1\n").unwrap();
        let f = depth_first_forest(sys.graph());
        let wto = construct_wto_bu(sys.graph(), &f);
        let result = solve_sequential(&sys, &wto);
        assert!(result.get(3).is_bottom());
        assert!(result.get(2).is_bottom());
        assert_eq!(
            result.get(1),
            &Env::top(1),
            "join over the reachable pred only"
        );
    }

    #[test]
    fn dump_format() {
        let sys = counter_program();
        let f = depth_first_forest(sys.graph());
        let wto = construct_wto_bu(sys.graph(), &f);
        let dump = solve_sequential(&sys, &wto).dump(&sys);
        assert!(dump.contains("7: x=[0,+inf]\n"), "{dump}");
        assert!(dump.starts_with("0: x=[-inf,+inf]\n"));
    }
}
