//! Global resource caps. Exceeding a cap is a hard error.

use anyhow::{bail, Result};

pub const DEFAULT_MAX_DEPTH: u32 = 20;
pub const DEFAULT_MAX_NODES: usize = 1 << 20;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_depth: u32,
    pub max_nodes: usize,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_depth: DEFAULT_MAX_DEPTH,
            max_nodes: DEFAULT_MAX_NODES,
            seed: DEFAULT_SEED,
        }
    }
}

impl Limits {
    pub fn depth(&self, what: &str, depth: u32) -> Result<u32> {
        if depth > self.max_depth {
            bail!("{what} depth {depth} exceeds the cap {} (raise --max-depth or DMLAB_MAX_DEPTH)", self.max_depth);
        }
        Ok(depth)
    }

    pub fn nodes(&self, what: &str, count: u64) -> Result<u64> {
        if count > self.max_nodes as u64 {
            bail!("{what} needs {count} nodes, above the cap {} (raise --max-nodes)", self.max_nodes);
        }
        Ok(count)
    }
}
