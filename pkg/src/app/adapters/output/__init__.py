"""Outbound adapters: transports between the simulated servers."""
