"""Starting fields for the cell-problem optimizer."""
