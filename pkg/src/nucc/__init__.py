"""Non-unitary coupled-cluster state preparation with mid-circuit measurements."""
