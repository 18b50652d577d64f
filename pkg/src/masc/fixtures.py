"""Synthetic fixtures: rotated raster classes and curved-manifold classes.

Both generators are pure functions of their config seed plus the generators
passed to the per-trial methods, so experiments are reproducible end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import gaussian_filter

from .data import Dataset, augment_virtual_samples, rotation_set, vectorize

FIXTURES = ("rotated-rasters", "curved-manifolds")


@dataclass(frozen=True)
class RotatedRasterConfig:
    """Classes of smooth random rasters observed under random rotations.

    Each class has ``labeled_per_class`` noisy variants of a base pattern as
    labelled samples, each augmented by one virtual sample per entry of
    ``virtual_angles``. Observation sets rotate a fresh variant by distinct
    uniform angles in ``theta_range``.
    """

    classes: int = 10
    shape: tuple[int, int] = (16, 16)
    labeled_per_class: int = 2
    virtual_angles: tuple[float, ...] = (-40.0, 40.0)
    theta_range: tuple[float, float] = (-40.0, 40.0)
    variant_noise: float = 0.25
    smoothness: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.classes < 2:
            raise ValueError("need at least 2 classes")
        if self.labeled_per_class < 1:
            raise ValueError("labeled_per_class >= 1 required")


class RotatedRasterFixture:
    def __init__(self, config: RotatedRasterConfig = RotatedRasterConfig()):
        self.config = config
        rng = np.random.default_rng(config.seed)
        self.bases = self._base_patterns(rng)
        labeled = []
        for cls, base in enumerate(self.bases, start=1):
            for _ in range(config.labeled_per_class):
                labeled.append((self._variant(base, rng), cls))
        self._labeled_patterns = labeled
        self.labeled = np.stack([vectorize(p) for p, _ in labeled])
        self.labeled_classes = np.asarray([cls for _, cls in labeled], dtype=int)
        self.virtual, self.virtual_classes = augment_virtual_samples(
            labeled, config.virtual_angles
        )
        X = np.vstack([self.labeled, self.virtual])
        ids = np.concatenate([self.labeled_classes, self.virtual_classes])
        self._train_sets = [X[ids == p] for p in range(1, config.classes + 1)]

    def _smooth(self, raw: np.ndarray) -> np.ndarray:
        sm = gaussian_filter(raw, sigma=self.config.smoothness, mode="constant")
        lo, hi = sm.min(), sm.max()
        return (sm - lo) / (hi - lo)

    def _base_patterns(self, rng) -> list[np.ndarray]:
        """Smooth random rasters, orthogonalized across classes.

        Removing the shared smooth-noise components keeps the class patterns
        distinguishable under rotation, which is what makes the fixture's
        separability controllable through ``variant_noise`` alone.
        """
        shape = self.config.shape
        bases, directions = [], []
        for _ in range(self.config.classes):
            v = vectorize(self._smooth(rng.random(shape)))
            v = v - v.mean()
            for u in directions:
                v = v - (v @ u) * u
            v = v / np.linalg.norm(v)
            directions.append(v)
            p = v.reshape(shape, order="F")
            bases.append((p - p.min()) / (p.max() - p.min()))
        return bases

    def _variant(self, base: np.ndarray, rng) -> np.ndarray:
        noise = self._smooth(rng.random(self.config.shape)) - 0.5
        return base + self.config.variant_noise * noise

    @property
    def classes(self) -> int:
        return self.config.classes

    def train_sets(self) -> list[np.ndarray]:
        return [ts.copy() for ts in self._train_sets]

    def make_instance(self, class_id: int, m: int, rng):
        """(train_sets, observations) with observations drawn from ``class_id``."""
        test_pattern = self._variant(self.bases[class_id - 1], rng)
        obs, _ = rotation_set(test_pattern, m, self.config.theta_range, rng)
        return self._train_sets, obs

    def make_dataset(self, class_id: int, m: int, rng) -> Dataset:
        _, obs = self.make_instance(class_id, m, rng)
        return Dataset(
            labeled=self.labeled,
            labeled_classes=self.labeled_classes,
            observations=obs,
            c=self.config.classes,
            virtual=self.virtual,
            virtual_classes=self.virtual_classes,
        )

    def gallery(self, per_class: int, rng) -> list[np.ndarray]:
        """Per-class sets of rotated variants, e.g. one synthetic session."""
        sets = []
        for base in self.bases:
            variant = self._variant(base, rng)
            samples, _ = rotation_set(variant, per_class, self.config.theta_range, rng)
            sets.append(samples)
        return sets


@dataclass(frozen=True)
class CurvedManifoldConfig:
    """Classes of noisy 1-D curves embedded in a higher-dimensional space.

    Two curve families inside a 4-D latent space, mapped into ``ambient_dim``
    dimensions by one random orthonormal matrix. ``kind="helix"`` (default)
    advances along one axis while circling a ring plane tilted per class;
    phase offsets keep the class curves geometrically apart even though
    their means coincide and their covariances differ only weakly, so local
    methods dominate global-summary methods. ``kind="sine"`` oscillates
    along a per-class direction instead. Observation sets cover one short
    random parameter window, i.e. a local patch of the curve.
    """

    classes: int = 3
    ambient_dim: int = 20
    train_per_class: int = 48
    kind: str = "helix"
    length: float = 6.0
    amplitude: float = 1.2
    radial_offset: float = 0.0
    frequencies: tuple[float, ...] = (2.8, 2.8, 2.8)
    phases: tuple[float, ...] = (0.0, 2.0944, 4.1888)
    tilt_deg: tuple[float, ...] = (0.0, 50.0, 100.0)
    arc_width: float = 0.08
    noise: float = 0.08
    seed: int = 0

    def __post_init__(self):
        if self.classes < 2:
            raise ValueError("need at least 2 classes")
        if self.kind not in ("helix", "sine"):
            raise ValueError("kind must be 'helix' or 'sine'")
        for name in ("frequencies", "phases", "tilt_deg"):
            if len(getattr(self, name)) != self.classes:
                raise ValueError(f"{name} must have one entry per class")
        if self.ambient_dim < 3:
            raise ValueError("ambient_dim >= 3 required")
        if not 0 < self.arc_width <= 1:
            raise ValueError("arc_width must be in (0, 1]")


class CurvedManifoldFixture:
    _LATENT_DIM = 4

    def __init__(self, config: CurvedManifoldConfig = CurvedManifoldConfig()):
        self.config = config
        rng = np.random.default_rng(config.seed)
        raw = rng.normal(size=(config.ambient_dim, self._LATENT_DIM))
        self._embed, _ = np.linalg.qr(raw)

    @property
    def classes(self) -> int:
        return self.config.classes

    def curve(self, class_id: int, ts) -> np.ndarray:
        """Noise-free curve points for parameters ts in [0, 1]."""
        cfg = self.config
        i = class_id - 1
        ts = np.asarray(ts, dtype=float)
        phase = 2.0 * np.pi * cfg.frequencies[i] * ts + cfg.phases[i]
        tilt = np.radians(cfg.tilt_deg[i])
        if cfg.kind == "helix":
            # phase-shifted helixes on per-class tilted ring planes: class
            # means coincide and covariances differ only through the tilt
            # direction, while the curves themselves never come closer than
            # the x-advance corresponding to the phase offset
            r = cfg.radial_offset + cfg.amplitude
            latent = np.stack(
                [
                    cfg.length * ts,
                    r * np.cos(phase),
                    r * np.sin(phase) * np.cos(tilt),
                    r * np.sin(phase) * np.sin(tilt),
                ],
                axis=1,
            )
        else:
            radial = cfg.radial_offset + cfg.amplitude * np.sin(phase)
            latent = np.stack(
                [
                    cfg.length * ts,
                    radial * np.cos(tilt),
                    radial * np.sin(tilt),
                    np.zeros_like(ts),
                ],
                axis=1,
            )
        return latent @ self._embed.T

    def sample(self, class_id: int, ts, rng) -> np.ndarray:
        pts = self.curve(class_id, ts)
        return pts + self.config.noise * rng.normal(size=pts.shape)

    def train_sets(self, rng) -> list[np.ndarray]:
        """One full-coverage training set per class (fresh draw per call)."""
        cfg = self.config
        sets = []
        for cls in range(1, cfg.classes + 1):
            ts = np.sort(rng.uniform(0.0, 1.0, cfg.train_per_class))
            sets.append(self.sample(cls, ts, rng))
        return sets

    def make_instance(self, class_id: int, m: int, rng):
        """(train_sets, observations); observations cover one short arc."""
        cfg = self.config
        train = self.train_sets(rng)
        t0 = float(rng.uniform(0.0, 1.0 - cfg.arc_width))
        ts = rng.uniform(t0, t0 + cfg.arc_width, m)
        obs = self.sample(class_id, ts, rng)
        return train, obs

    def make_dataset(self, class_id: int, m: int, rng) -> Dataset:
        train, obs = self.make_instance(class_id, m, rng)
        labeled = np.vstack(train)
        classes = np.concatenate(
            [np.full(len(ts), p) for p, ts in enumerate(train, start=1)]
        )
        return Dataset(
            labeled=labeled,
            labeled_classes=classes,
            observations=obs,
            c=self.config.classes,
        )

    def gallery(self, per_class: int, rng) -> list[np.ndarray]:
        cfg = self.config
        sets = []
        for cls in range(1, cfg.classes + 1):
            ts = np.sort(rng.uniform(0.0, 1.0, per_class))
            sets.append(self.sample(cls, ts, rng))
        return sets


def make_fixture(name: str, classes: int | None = None, seed: int = 0):
    """Fixture factory used by the CLI; None keeps each fixture's default size."""
    if name == "rotated-rasters":
        kwargs = {"seed": seed}
        if classes is not None:
            kwargs["classes"] = classes
        return RotatedRasterFixture(RotatedRasterConfig(**kwargs))
    if name == "curved-manifolds":
        kwargs = {"seed": seed}
        if classes is not None and classes != 3:
            raise ValueError("curved-manifolds is a 3-class fixture")
        return CurvedManifoldFixture(CurvedManifoldConfig(**kwargs))
    raise ValueError(f"unknown fixture {name!r} (choose from {FIXTURES})")
