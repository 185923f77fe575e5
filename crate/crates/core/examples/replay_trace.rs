//! Parses a trace, replays it on the tree and the oracle in lockstep and
//! prints the query answers.
//!
//! cargo run --example replay_trace

use dynfusion::{FusionTree, Op, OpTrace, OracleSet};

const TRACE: &str = "\
ins 0x91
ins 0x92
ins 0xd2
ins 0xda
ins 0xfa
rank 0xc0
pred 0xc0
succ 0xc0
del 0xd2
sel 2
mem 0xd2
";

fn main() -> dynfusion::Result<()> {
    let trace = OpTrace::parse(TRACE, 256)?;
    let mut tree = FusionTree::new(256, 4)?;
    let mut oracle = OracleSet::new(256);
    match trace.replay_both(&mut tree, &mut oracle) {
        Ok(answers) => {
            let queries = trace.ops().filter(|op| !matches!(op, Op::Ins(_) | Op::Del(_)));
            for (op, answer) in queries.zip(answers) {
                println!("{op:<10} -> {answer}");
            }
        }
        Err(d) => println!("divergence: {d}"),
    }
    Ok(())
}
