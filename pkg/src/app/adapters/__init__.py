"""Adapters following hexagonal architecture.

- ports: interfaces (contracts) for secondary actors (the inter-server link).
- output: adapters that implement ports (in-process queues for both execution modes).
"""
