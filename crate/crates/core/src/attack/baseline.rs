// SPDX-License-Identifier: Apache-2.0

use super::{Candidate, Oracle, RecoveryResult, Run, Stop};
use crate::attack::AttackConfig;
use crate::circuit::Topology;

/// Monolithic loop: one session holds two symbolic copies constrained by all
/// observations plus a miter on a shared symbolic input. Each model yields
/// two candidates and the input separating them.
pub fn run_baseline(topo: &Topology, oracle: &mut Oracle, cfg: &AttackConfig) -> RecoveryResult {
    let mut run = match Run::new(topo, oracle, cfg) {
        Ok(r) => r,
        Err(e) => return RecoveryResult::failed(topo, e),
    };
    let outcome = search(&mut run, oracle);
    run.finish(oracle, outcome)
}

fn search(run: &mut Run, oracle: &mut Oracle) -> Result<Candidate, Stop> {
    let mut enc = run.encoder();
    let c1 = enc.add_copy(&run.domains)?;
    let c2 = enc.add_copy(&run.domains)?;
    let x_vars = enc.diff_constr(c1, c2)?;
    let outcome = loop {
        if let Err(stop) = run.check_time() {
            break Err(stop);
        }
        run.iterations += 1;
        if !enc.session_mut().solve()? {
            break Ok(());
        }
        let t1 = Run::decode(&enc, c1)?;
        let t2 = Run::decode(&enc, c2)?;
        let x = enc.decode_bits(&x_vars);
        let z = run.observe(oracle, x.clone())?;
        enc.encode_sample(c1, &x, &z)?;
        enc.encode_sample(c2, &x, &z)?;
        for t in [&t1, &t2] {
            if !t.predicts(run.topo, &run.part, &x, &z)? {
                for c in [c1, c2] {
                    enc.block(c, &t.asg, Some(&t.y), None)?;
                }
            }
        }
    };
    run.stats.absorb(&enc.session().stats());
    outcome?;
    run.extract()
}
