"""
Shared fixtures for FacadeLens tests.
"""

import pytest

from facadelens.services.ingest import label_images
from facadelens.services.synthgen import SynthSpec, generate


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A rendered 24-property synthetic corpus shared by the slower tests."""
    out_dir = tmp_path_factory.mktemp("corpus")
    return generate(SynthSpec(n_properties=24, seed=3), out_dir)


@pytest.fixture(scope="session")
def labeled_samples(small_corpus):
    """Every image of the shared corpus joined with its property labels."""
    return label_images(small_corpus.images, small_corpus.properties)
