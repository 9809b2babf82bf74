import numpy as np
import pytest

from skelact.skeleton_io import SyntheticSpec, generate_synthetic


@pytest.fixture(scope="session")
def clean_synth():
    """Small clean dataset: 3 classes, no noise/jitter/drops."""
    spec = SyntheticSpec(
        class_count=3,
        sequences_per_class=6,
        joint_count=6,
        base_length=(30, 50),
        seed=7,
        subject_count=3,
    )
    return spec, *generate_synthetic(spec)


@pytest.fixture(scope="session")
def noisy_synth():
    """Noisier dataset exercising jitter, noise, and missing joints."""
    spec = SyntheticSpec(
        class_count=4,
        sequences_per_class=8,
        joint_count=7,
        base_length=(40, 80),
        speed_jitter=0.2,
        noise_sigma=0.02,
        missing_joint_prob=0.02,
        periodic_class_flags=(False, True, False, True),
        seed=11,
        subject_count=4,
    )
    return spec, *generate_synthetic(spec)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
