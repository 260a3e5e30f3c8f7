"""Deterministic incremental reachability and shortest-path structures."""
