"""Test that every package module imports cleanly.

This catches import-time errors such as circular imports between the protocol layers, missing
re-exports and schema forward references.
"""

import importlib

import pytest

MODULES = [
    "src.app.main",
    "src.app.commands",
    "src.app.collection.assembly",
    "src.app.collection.binning",
    "src.app.collection.histogram",
    "src.app.eigen.extract",
    "src.app.eigen.krylov",
    "src.app.eigen.newton",
    "src.app.eigen.qr",
    "src.app.fss.dcf",
    "src.app.fss.dpf",
    "src.app.graph",
    "src.app.ldp.client",
    "src.app.ldp.share_file",
    "src.app.mpc.compare",
    "src.app.reference.pipeline",
    "src.app.sim.runner",
]


@pytest.mark.parametrize("name", MODULES)
def test_import_module(name):
    """Test that the module can be imported."""
    try:
        assert importlib.import_module(name) is not None
    except Exception as e:
        pytest.fail(f"Failed to import {name}: {e}")


def test_report_schemas_rebuild():
    """Test that report records resolve their forward references."""
    try:
        from src.app.schemas.report import RunReport, TranscriptRecord

        TranscriptRecord.model_rebuild()
        RunReport.model_rebuild()
    except Exception as e:
        pytest.fail(f"Failed to rebuild report schemas: {e}")
