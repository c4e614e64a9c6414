// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};

use crate::circuit::{Assignment, BitVector, HiddenPartition, Topology};
use crate::error::{Error, Result};

/// Something that evaluates the secret circuit on attacker-chosen inputs.
pub trait OracleBackend: Send {
    fn input_width(&self) -> usize;
    fn output_width(&self) -> usize;
    fn evaluate(&mut self, x: &BitVector) -> Result<BitVector>;
}

/// Query front end: checks widths, caches answers and counts distinct inputs.
pub struct Oracle {
    backend: Box<dyn OracleBackend>,
    cache: HashMap<BitVector, BitVector>,
}

impl Oracle {
    pub fn new(backend: Box<dyn OracleBackend>) -> Oracle {
        Oracle {
            backend,
            cache: HashMap::new(),
        }
    }

    /// The circuit itself, every input attacker-controlled.
    pub fn in_process(topo: Topology, asg: Assignment) -> Result<Oracle> {
        let part = HiddenPartition::none(topo.n());
        Oracle::fixed_hidden(topo, asg, part, BitVector::default())
    }

    /// The circuit with its hidden inputs held at `y` for the whole attack.
    pub fn fixed_hidden(topo: Topology, asg: Assignment, part: HiddenPartition, y: BitVector) -> Result<Oracle> {
        topo.check_assignment(&asg)?;
        if part.n() != topo.n() {
            return Err(Error::Config("hidden partition does not match the circuit".into()));
        }
        if y.len() != part.hidden_width() {
            return Err(Error::Shape {
                expected: part.hidden_width(),
                got: y.len(),
            });
        }
        Ok(Oracle::new(Box::new(CircuitOracle { topo, asg, part, y })))
    }

    /// A child process speaking the line protocol: one line of `n` bits in,
    /// one line of `m` bits out.
    pub fn external(command: &str, n: usize, m: usize) -> Result<Oracle> {
        Ok(Oracle::new(Box::new(ExternalOracle::spawn(command, n, m)?)))
    }

    pub fn input_width(&self) -> usize {
        self.backend.input_width()
    }

    pub fn output_width(&self) -> usize {
        self.backend.output_width()
    }

    pub fn query(&mut self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.input_width() {
            return Err(Error::Shape {
                expected: self.input_width(),
                got: x.len(),
            });
        }
        if let Some(z) = self.cache.get(x) {
            return Ok(z.clone());
        }
        let z = self.backend.evaluate(x)?;
        if z.len() != self.output_width() {
            return Err(Error::Oracle(format!(
                "reply has {} bits, expected {}",
                z.len(),
                self.output_width()
            )));
        }
        self.cache.insert(x.clone(), z.clone());
        Ok(z)
    }

    /// Number of distinct inputs queried so far.
    pub fn query_count(&self) -> usize {
        self.cache.len()
    }
}

impl std::fmt::Debug for Oracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Oracle")
            .field("n", &self.input_width())
            .field("m", &self.output_width())
            .field("queries", &self.query_count())
            .finish()
    }
}

struct CircuitOracle {
    topo: Topology,
    asg: Assignment,
    part: HiddenPartition,
    y: BitVector,
}

impl OracleBackend for CircuitOracle {
    fn input_width(&self) -> usize {
        self.part.visible_width()
    }

    fn output_width(&self) -> usize {
        self.topo.m()
    }

    fn evaluate(&mut self, x: &BitVector) -> Result<BitVector> {
        let full = self.part.merge(x, &self.y)?;
        self.topo.eval(&self.asg, &full)
    }
}

struct ExternalOracle {
    child: Child,
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
    n: usize,
    m: usize,
    line: String,
}

impl ExternalOracle {
    fn spawn(command: &str, n: usize, m: usize) -> Result<ExternalOracle> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| Error::Oracle(format!("cannot start `{command}`: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(ExternalOracle {
            child,
            stdin,
            stdout,
            n,
            m,
            line: String::new(),
        })
    }
}

impl OracleBackend for ExternalOracle {
    fn input_width(&self) -> usize {
        self.n
    }

    fn output_width(&self) -> usize {
        self.m
    }

    fn evaluate(&mut self, x: &BitVector) -> Result<BitVector> {
        writeln!(self.stdin, "{x}")
            .and_then(|_| self.stdin.flush())
            .map_err(|e| Error::Oracle(format!("write to oracle process failed: {e}")))?;
        self.line.clear();
        let read = self
            .stdout
            .read_line(&mut self.line)
            .map_err(|e| Error::Oracle(format!("read from oracle process failed: {e}")))?;
        if read == 0 {
            return Err(Error::Oracle("oracle process closed its output".into()));
        }
        let reply = self.line.trim_end_matches(['\n', '\r']);
        if reply.len() != self.m || !reply.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Oracle(format!("malformed reply `{reply}`")));
        }
        BitVector::parse_bits(reply)
    }
}

impl Drop for ExternalOracle {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
