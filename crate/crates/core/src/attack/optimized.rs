// SPDX-License-Identifier: Apache-2.0

use super::{find_discriminating_input, Candidate, Oracle, RecoveryResult, Run, Stop};
use crate::attack::AttackConfig;
use crate::circuit::{BitVector, Topology};
use crate::error::Result;
use crate::sat::{CopyId, Encoder, Lit};

/// Incremental loop.
///
/// A persistent single-copy session proposes a candidate `T1`. Further
/// candidates `T2` are drawn from the same session with `T1` and every
/// equivalent `T2` seen so far blocked under a per-iteration activation
/// literal, and each pair is compared by a small concrete miter. A separating
/// input is queried and refuted candidates are blocked for good, which
/// retires the activation literal and restarts the outer loop. After `n_max`
/// equivalent pairs in a row a two-copy formula with `T1` frozen either finds
/// a separating input directly or proves `T1` complete.
pub fn run_optimized(topo: &Topology, oracle: &mut Oracle, cfg: &AttackConfig) -> RecoveryResult {
    let mut run = match Run::new(topo, oracle, cfg) {
        Ok(r) => r,
        Err(e) => return RecoveryResult::failed(topo, e),
    };
    let mut state = match State::new(&run) {
        Ok(s) => s,
        Err(e) => return run.finish(oracle, Err(Stop::Failed(e))),
    };
    let outcome = state.search(&mut run, oracle);
    run.stats.absorb(&state.one.session().stats());
    if let Some(f) = &state.fallback {
        run.stats.absorb(&f.enc.session().stats());
    }
    run.finish(oracle, outcome)
}

/// Two-copy formula for the fallback, built once and extended lazily.
struct Fallback<'t> {
    enc: Encoder<'t>,
    frozen: CopyId,
    free: CopyId,
    x: Vec<Lit>,
    rows: usize,
    blocks: usize,
}

struct State<'t> {
    one: Encoder<'t>,
    copy: CopyId,
    rows: usize,
    /// Refuted candidates, replayed into the fallback formula.
    global_blocks: Vec<Candidate>,
    fallback: Option<Fallback<'t>>,
}

enum Inner {
    /// A new observation was made; restart the outer loop.
    Progress,
    /// No candidate distinguishable from `T1` remains.
    Complete,
}

impl<'t> State<'t> {
    fn new(run: &Run<'t>) -> Result<State<'t>> {
        let mut one = run.encoder();
        let copy = one.add_copy(&run.domains)?;
        Ok(State {
            one,
            copy,
            rows: 0,
            global_blocks: Vec::new(),
            fallback: None,
        })
    }

    fn sync_rows(&mut self, run: &Run) -> Result<()> {
        for o in &run.di[self.rows..] {
            self.one.encode_sample(self.copy, &o.x, &o.z)?;
        }
        self.rows = run.di.len();
        Ok(())
    }

    fn search(&mut self, run: &mut Run<'t>, oracle: &mut Oracle) -> std::result::Result<Candidate, Stop> {
        loop {
            run.check_time()?;
            run.iterations += 1;
            self.sync_rows(run)?;
            if !self.one.session_mut().solve()? {
                break;
            }
            let t1 = Run::decode(&self.one, self.copy)?;
            let guard = self.one.session_mut().new_activation();
            self.one.block(self.copy, &t1.asg, Some(&t1.y), Some(guard))?;
            let inner = self.inner(run, oracle, &t1, guard);
            self.one.session_mut().retire(guard);
            match inner? {
                Inner::Progress => continue,
                Inner::Complete => break,
            }
        }
        self.sync_rows(run)?;
        run.check_time()?;
        if !self.one.session_mut().solve()? {
            return Err(Stop::Failed(crate::error::Error::Internal(
                "no assignment reproduces the observations".into(),
            )));
        }
        Ok(Run::decode(&self.one, self.copy)?)
    }

    fn inner(&mut self, run: &mut Run<'t>, oracle: &mut Oracle, t1: &Candidate, guard: Lit) -> std::result::Result<Inner, Stop> {
        let mut fruitless = 0;
        loop {
            run.check_time()?;
            if fruitless >= run.cfg.n_max {
                return self.fallback(run, oracle, t1);
            }
            if !self.one.session_mut().solve_with(&[guard])? {
                return Ok(Inner::Complete);
            }
            let t2 = Run::decode(&self.one, self.copy)?;
            let x = find_discriminating_input(run.topo, &run.part, t1.instance(), t2.instance(), run.cfg.solver)?;
            match x {
                Some(x) => {
                    self.refute(run, oracle, x, [t1, &t2])?;
                    return Ok(Inner::Progress);
                }
                None => {
                    run.equivalent_pairs += 1;
                    fruitless += 1;
                    self.one.block(self.copy, &t2.asg, Some(&t2.y), Some(guard))?;
                }
            }
        }
    }

    /// Queries `x` and permanently blocks every candidate it refutes.
    fn refute(&mut self, run: &mut Run, oracle: &mut Oracle, x: BitVector, cands: [&Candidate; 2]) -> Result<()> {
        let z = run.observe(oracle, x.clone())?;
        for t in cands {
            if !t.predicts(run.topo, &run.part, &x, &z)? {
                self.one.block(self.copy, &t.asg, Some(&t.y), None)?;
                self.global_blocks.push(t.clone());
            }
        }
        Ok(())
    }

    fn fallback(&mut self, run: &mut Run<'t>, oracle: &mut Oracle, t1: &Candidate) -> std::result::Result<Inner, Stop> {
        run.fallback_calls += 1;
        if self.fallback.is_none() {
            let mut enc = run.encoder();
            let frozen = enc.add_copy(&run.domains)?;
            let free = enc.add_copy(&run.domains)?;
            let x = enc.diff_constr(frozen, free)?;
            self.fallback = Some(Fallback {
                enc,
                frozen,
                free,
                x,
                rows: 0,
                blocks: 0,
            });
        }
        let fb = self.fallback.as_mut().expect("built above");
        for o in &run.di[fb.rows..] {
            fb.enc.encode_sample(fb.free, &o.x, &o.z)?;
        }
        fb.rows = run.di.len();
        for b in &self.global_blocks[fb.blocks..] {
            fb.enc.block(fb.free, &b.asg, Some(&b.y), None)?;
        }
        fb.blocks = self.global_blocks.len();
        let mut assumptions = fb.enc.freeze_literals(fb.frozen, &t1.asg)?;
        assumptions.extend(fb.enc.hidden_literals(fb.frozen, &t1.y)?);
        run.check_time()?;
        if !fb.enc.session_mut().solve_with(&assumptions)? {
            return Ok(Inner::Complete);
        }
        let t2 = Run::decode(&fb.enc, fb.free)?;
        let x = fb.enc.decode_bits(&fb.x);
        self.refute(run, oracle, x, [t1, &t2])?;
        Ok(Inner::Progress)
    }
}
