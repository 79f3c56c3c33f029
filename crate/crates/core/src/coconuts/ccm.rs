//! Computing-component managers: per-virtual-system wrappers around a
//! component with working memory and a solution buffer.

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CcmError {
    #[error("component already released")]
    Released,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CcmStats {
    pub requests: u64,
    pub failures: u64,
}

#[derive(Debug, Clone)]
pub struct Ccm<S> {
    pub component: &'static str,
    /// Input of the request being processed.
    pub short_term: Option<String>,
    /// Accumulated over the life of the virtual system.
    pub long_term: CcmStats,
    buffer: Vec<S>,
    cursor: usize,
    released: bool,
    limit: usize,
}

impl<S> Ccm<S> {
    pub fn new(component: &'static str, limit: usize) -> Self {
        Ccm {
            component,
            short_term: None,
            long_term: CcmStats::default(),
            buffer: Vec::new(),
            cursor: 0,
            released: false,
            limit: limit.max(1),
        }
    }

    /// Starts a new request: fills the buffer (up to the limit) and binds
    /// the component again.
    pub fn load(&mut self, input: impl Into<String>, solutions: Vec<S>) {
        self.short_term = Some(input.into());
        self.long_term.requests += 1;
        self.buffer = solutions;
        self.buffer.truncate(self.limit);
        self.cursor = 0;
        self.released = false;
    }

    pub fn record_failure(&mut self) {
        self.long_term.failures += 1;
    }

    pub fn current(&self) -> Option<&S> {
        self.buffer.get(self.cursor)
    }

    /// Moves to the next buffered solution.
    pub fn advance(&mut self) -> Result<Option<&S>, CcmError> {
        if self.released {
            return Err(CcmError::Released);
        }
        if self.cursor < self.buffer.len() {
            self.cursor += 1;
        }
        Ok(self.buffer.get(self.cursor))
    }

    /// Frees the component; buffered solutions stay readable.
    pub fn release(&mut self) {
        self.released = true;
    }

    pub fn is_released(&self) -> bool {
        self.released
    }

    pub fn is_exhausted(&self) -> bool {
        self.cursor >= self.buffer.len()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn buffer(&self) -> &[S] {
        &self.buffer
    }

    /// Clears all per-dialogue state.
    pub fn reset(&mut self) {
        *self = Ccm::new(self.component, self.limit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_solutions_then_exhausted() {
        let mut c = Ccm::new("semantics", 8);
        c.load("x", vec![1, 2, 3]);
        assert_eq!(c.current(), Some(&1));
        assert_eq!(c.advance(), Ok(Some(&2)));
        assert_eq!(c.advance(), Ok(Some(&3)));
        assert_eq!(c.advance(), Ok(None));
        assert_eq!(c.advance(), Ok(None));
        assert!(c.cursor() <= c.buffer().len());
    }

    #[test]
    fn release_keeps_buffer_readable() {
        let mut c = Ccm::new("semantics", 8);
        c.load("x", vec![1, 2]);
        c.release();
        c.release();
        assert_eq!(c.current(), Some(&1));
        assert_eq!(c.buffer(), &[1, 2]);
        assert_eq!(c.advance(), Err(CcmError::Released));
    }

    #[test]
    fn buffer_limit() {
        let mut c = Ccm::new("semantics", 2);
        c.load("x", vec![1, 2, 3]);
        assert_eq!(c.buffer().len(), 2);
    }
}
