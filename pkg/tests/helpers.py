import random

from hypothesis import strategies as st

from astar_mle.dem import DetectorErrorModel
from astar_mle.shots import sample_shots


def random_model(rng, max_errors=12, max_detectors=10, max_weight=3, p_range=(0.01, 0.3), n_obs=2):
    nd = rng.randint(1, max_detectors)
    ne = rng.randint(1, max_errors)
    mechs = []
    for _ in range(ne):
        dets = rng.sample(range(nd), rng.randint(1, min(max_weight, nd)))
        obs = [o for o in range(n_obs) if rng.random() < 0.3]
        mechs.append((rng.uniform(*p_range), dets, obs))
    return DetectorErrorModel.from_mechanisms(mechs, num_detectors=nd, num_observables=n_obs)


def oracle_corpus(n=500, seed=2024):
    """Small models, one sampled shot each, plus one uniformly random syndrome each."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        model = random_model(rng)
        shot = sample_shots(model, 1, seed + i)[0]
        random_syndrome = tuple(rng.randint(0, 1) for _ in range(model.num_detectors))
        out.append((model, shot.syndrome, random_syndrome))
    return out


@st.composite
def models(draw, max_errors=12, max_detectors=10, max_weight=4):
    nd = draw(st.integers(1, max_detectors))
    ne = draw(st.integers(0, max_errors))
    mechs = []
    for _ in range(ne):
        dets = draw(st.lists(st.integers(0, nd - 1), min_size=1, max_size=max_weight, unique=True))
        obs = draw(st.lists(st.integers(0, 2), max_size=2, unique=True))
        p = draw(st.floats(1e-6, 0.499, allow_nan=False))
        mechs.append((p, dets, obs))
    return DetectorErrorModel.from_mechanisms(mechs, num_detectors=nd, num_observables=3)
