use std::sync::Arc;

use super::build::{build_pair, BuilderConfig};
use crate::calogero::StateSource;
use crate::error::Result;
use crate::fpcore::{LaxField, LaxSlice};

/// The explicit pair along a trajectory (or at a single state): every
/// time slice is rebuilt from the state at that time.
#[derive(Clone)]
pub struct BuiltLax {
    pub source: Arc<dyn StateSource>,
    pub config: BuilderConfig,
}

impl BuiltLax {
    pub fn new(source: Arc<dyn StateSource>, config: BuilderConfig) -> Self {
        Self { source, config }
    }
}

impl LaxField for BuiltLax {
    fn slice(&self, t: f64) -> Result<Box<dyn LaxSlice + '_>> {
        Ok(Box::new(build_pair(&self.source.state_at(t)?, &self.config)?))
    }
}
