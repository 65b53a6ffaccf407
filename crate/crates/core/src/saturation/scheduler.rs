//! Rule schedulers: which rules are searched in a given iteration.

pub trait Scheduler {
    fn can_search(&mut self, rule: usize, iter: usize) -> bool;

    /// Reports the number of matches rule `rule` found in iteration `iter`.
    /// Returns false if the rule is now banned and its matches must be
    /// dropped.
    fn inform(&mut self, rule: usize, n_matches: usize, iter: usize) -> bool;

    /// Called when iteration `iter` changed nothing. Returns true if that
    /// means saturation; otherwise the scheduler has lifted bans so the next
    /// iteration can make progress.
    fn can_stop(&mut self, iter: usize) -> bool;
}

/// Searches every rule every iteration.
#[derive(Debug, Default, Clone)]
pub struct SimpleScheduler;

impl Scheduler for SimpleScheduler {
    fn can_search(&mut self, _rule: usize, _iter: usize) -> bool {
        true
    }

    fn inform(&mut self, _rule: usize, _n_matches: usize, _iter: usize) -> bool {
        true
    }

    fn can_stop(&mut self, _iter: usize) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackoffState {
    pub match_limit: usize,
    pub ban_length: usize,
    /// First iteration in which the rule may be searched again.
    pub banned_until: usize,
    pub times_banned: usize,
}

/// Bans a rule whose match count exceeds its limit; each ban doubles both the
/// rule's limit and its next ban length.
#[derive(Debug, Clone)]
pub struct BackoffScheduler {
    match_limit: usize,
    ban_length: usize,
    states: Vec<BackoffState>,
}

impl BackoffScheduler {
    pub fn new(match_limit: usize, ban_length: usize) -> Self {
        BackoffScheduler {
            match_limit,
            ban_length,
            states: Vec::new(),
        }
    }

    pub fn state(&mut self, rule: usize) -> &mut BackoffState {
        while self.states.len() <= rule {
            self.states.push(BackoffState {
                match_limit: self.match_limit,
                ban_length: self.ban_length,
                banned_until: 0,
                times_banned: 0,
            });
        }
        &mut self.states[rule]
    }
}

impl Scheduler for BackoffScheduler {
    fn can_search(&mut self, rule: usize, iter: usize) -> bool {
        iter >= self.state(rule).banned_until
    }

    fn inform(&mut self, rule: usize, n_matches: usize, iter: usize) -> bool {
        let s = self.state(rule);
        if n_matches <= s.match_limit {
            return true;
        }
        s.banned_until = iter + s.ban_length + 1;
        s.times_banned += 1;
        s.match_limit = s.match_limit.saturating_mul(2);
        s.ban_length = s.ban_length.saturating_mul(2);
        log::debug!("banning rule {rule} until iteration {}", s.banned_until);
        false
    }

    fn can_stop(&mut self, iter: usize) -> bool {
        let next = iter + 1;
        let Some(first) = self.states.iter().map(|s| s.banned_until).filter(|&b| b > next).min() else {
            return true;
        };
        let shift = first - next;
        for s in &mut self.states {
            if s.banned_until > next {
                s.banned_until -= shift;
            }
        }
        false
    }
}
