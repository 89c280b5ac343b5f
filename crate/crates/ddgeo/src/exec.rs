//! A proposer backed by an external command. The request goes to the
//! command's stdin; each reply line on stdout is `score TAB clause`.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::Duration;

use ddgeo_core::prover::{parse_reply, ProofState, Proposal, Proposer};

/// Environment variable carrying the number of proposals wanted.
pub const K_VAR: &str = "DDGEO_K";

pub struct ExecProposer<'p> {
    command: String,
    timeout: Duration,
    fallback: Option<Box<dyn Proposer + 'p>>,
    unavailable: bool,
    /// Calls that timed out, failed or returned malformed lines.
    pub faults: usize,
}

impl<'p> ExecProposer<'p> {
    pub fn new(command: impl Into<String>, timeout: Duration) -> Self {
        ExecProposer {
            command: command.into(),
            timeout,
            fallback: None,
            unavailable: false,
            faults: 0,
        }
    }

    /// Used once the command proves unavailable.
    pub fn with_fallback(mut self, p: Box<dyn Proposer + 'p>) -> Self {
        self.fallback = Some(p);
        self
    }

    pub fn is_unavailable(&self) -> bool {
        self.unavailable
    }

    fn mark_unavailable(&mut self, why: &str) {
        if !self.unavailable {
            log::error!("proposer unavailable: {}: {why}", self.command);
        }
        self.unavailable = true;
    }

    /// Runs the command once; None on timeout or failure.
    fn call(&mut self, request: &str, k: usize) -> Option<String> {
        let mut child = match Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .env(K_VAR, k.to_string())
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
        {
            Ok(c) => c,
            Err(e) => {
                self.mark_unavailable(&e.to_string());
                return None;
            }
        };
        let mut stdin = child.stdin.take().expect("piped stdin");
        let mut stdout = child.stdout.take().expect("piped stdout");
        let req = request.to_owned();
        // a writer thread avoids a deadlock when the command does not read its input
        std::thread::spawn(move || {
            let _ = stdin.write_all(req.as_bytes());
        });
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut s = String::new();
            let r = stdout.read_to_string(&mut s).map(|_| s);
            let _ = tx.send(r);
        });
        match rx.recv_timeout(self.timeout) {
            Ok(Ok(text)) => {
                let status = child.wait().ok().and_then(|s| s.code());
                if matches!(status, Some(126 | 127)) && text.trim().is_empty() {
                    self.mark_unavailable("command not found or not executable");
                    return None;
                }
                Some(text)
            }
            Ok(Err(e)) => {
                let _ = child.kill();
                let _ = child.wait();
                log::warn!("proposer output unreadable: {e}");
                None
            }
            Err(_) => {
                let _ = child.kill();
                let _ = child.wait();
                log::warn!("proposer timed out after {:?}", self.timeout);
                None
            }
        }
    }
}

impl Proposer for ExecProposer<'_> {
    fn propose(&mut self, state: &ProofState, k: usize) -> Vec<Proposal> {
        if !self.unavailable {
            if let Some(text) = self.call(&state.request(), k) {
                let (mut props, bad) = parse_reply(&text);
                if bad > 0 {
                    self.faults += 1;
                    log::warn!("proposer returned {bad} malformed lines");
                }
                props.truncate(k);
                return props;
            }
            self.faults += 1;
        }
        if self.unavailable {
            if let Some(f) = self.fallback.as_mut() {
                return f.propose(state, k);
            }
        }
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ddgeo_core::catalog::Catalog;
    use ddgeo_core::engine::{NoClock, RuleSet};
    use ddgeo_core::lang::parse_problem;
    use ddgeo_core::prover::{solve, FixedProposer, NoProposer, SearchBudget};

    const NO_H: &str =
        "a b c : ; d : coll b c d ; e : eqangle a d d e d e b d, eqangle a b a e a e a d ; \
f : coll a b f, perp a b f e ; g : coll b d g, perp b d g e ? cong f e g e";

    fn run(p: &mut dyn Proposer) -> bool {
        let problem = parse_problem(NO_H).unwrap();
        let b = SearchBudget {
            depth: 1,
            ..SearchBudget::default()
        };
        solve(
            &problem,
            &Catalog::default_catalog(),
            &RuleSet::default_rules(),
            p,
            &b,
            0,
            &NoClock,
        )
        .unwrap()
        .solved()
    }

    #[test]
    fn echo_command_solves() {
        let mut p = ExecProposer::new(
            "cat >/dev/null; printf '1.0\\th : coll a d h, perp a d h e\\n'",
            Duration::from_secs(10),
        );
        assert!(run(&mut p));
        assert_eq!(p.faults, 0);
    }

    #[test]
    fn request_reaches_the_command() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("req.txt");
        let mut p = ExecProposer::new(format!("cat > {}", f.display()), Duration::from_secs(10));
        assert!(!run(&mut p));
        let req = std::fs::read_to_string(&f).unwrap();
        assert!(
            req.starts_with("<problem>") && req.contains("<aux>"),
            "{req}"
        );
    }

    #[test]
    fn timeout_gives_nothing() {
        let mut p = ExecProposer::new("sleep 5", Duration::from_millis(100));
        assert!(!run(&mut p));
        assert!(p.faults >= 1);
        assert!(!p.is_unavailable());
    }

    #[test]
    fn missing_command_falls_back() {
        let fixed = FixedProposer(vec![Proposal {
            score: 1.0,
            clause: "h : coll a d h, perp a d h e".into(),
        }]);
        let mut p = ExecProposer::new("/nonexistent/proposer", Duration::from_secs(10))
            .with_fallback(Box::new(fixed));
        assert!(run(&mut p));
        assert!(p.is_unavailable());
        let mut q = ExecProposer::new("/nonexistent/proposer", Duration::from_secs(10))
            .with_fallback(Box::new(NoProposer));
        assert!(!run(&mut q));
    }
}
