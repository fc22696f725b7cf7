/// Counters collected while evaluating one check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    /// Highest number of under-approximation iterations that produced a
    /// zone in any single NZF query.
    pub level_used: usize,
    /// False once some under-approximate NZF query ran out of levels
    /// before the zone search came back empty.
    pub saturated: bool,
    /// Candidate fair zones tried by the zone search.
    pub zones_enumerated: usize,
    /// Nodes expanded by the backward depth-first search.
    pub dfs_nodes: usize,
    /// Rounds of least- and greatest-fixpoint iteration.
    pub fixpoint_iterations: usize,
    /// Largest zone count of any intermediate state set.
    pub peak_zones: usize,
}

impl Stats {
    pub fn new() -> Stats {
        Stats {
            saturated: true,
            ..Stats::default()
        }
    }

    pub fn observe_zones(&mut self, count: usize) {
        self.peak_zones = self.peak_zones.max(count);
    }
}
