"""
Sample Data Generator
Creates synthetic cross-domain datasets with a known dictionary and a
controllable domain shift, for testing and demos
"""

import math
from dataclasses import dataclass, asdict, replace
from typing import Dict, List, Tuple

import numpy as np

from src.coding.exceptions import InvalidConfigError
from src.coding.models import Dataset, Domain


@dataclass(frozen=True)
class SynthConfig:
    """Shape and difficulty of a synthetic cross-domain problem"""
    n_features: int = 20          # D
    n_atoms: int = 15             # K_true
    n_source: int = 30            # N_S
    n_target: int = 30            # training targets N_T
    n_test: int = 40              # held-out targets
    n_classes: int = 4
    sparsity: int = 3             # nonzeros per code
    shift: float = 2.0            # norm of the target-domain offset
    noise: float = 0.1            # additive Gaussian noise scale
    target_label_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self):
        issues = []
        for name in ('n_features', 'n_atoms', 'n_source', 'n_target', 'n_test',
                     'n_classes', 'sparsity'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                issues.append(f"{name} must be an integer >= 1, got {value}")
        if self.sparsity > self.n_atoms:
            issues.append(f"sparsity {self.sparsity} exceeds n_atoms {self.n_atoms}")
        if self.n_classes > min(self.n_source, self.n_target):
            issues.append(f"n_classes {self.n_classes} exceeds min(n_source, n_target)")
        if not (math.isfinite(self.shift) and self.shift >= 0):
            issues.append(f"shift must be >= 0, got {self.shift}")
        if not (math.isfinite(self.noise) and self.noise >= 0):
            issues.append(f"noise must be >= 0, got {self.noise}")
        if not 0 <= self.target_label_fraction <= 1:
            issues.append(
                f"target_label_fraction must lie in [0, 1], got {self.target_label_fraction}")
        if issues:
            raise InvalidConfigError("; ".join(issues))

    def with_updates(self, **changes) -> "SynthConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_config(cls, config: Dict) -> "SynthConfig":
        """Build from the 'synthetic' section of a loaded configuration"""
        section = dict(config.get('synthetic') or {})
        unknown = set(section) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidConfigError(f"unknown synthetic settings: {sorted(unknown)}")
        return cls(**section)


@dataclass(eq=False)
class GroundTruth:
    """Generating parameters of a synthetic dataset"""
    dictionary: np.ndarray            # D x K_true, unit-norm columns
    codes: np.ndarray                 # K_true x N for the training samples
    test_codes: np.ndarray            # K_true x n_test
    shift_vector: np.ndarray          # added to every target sample
    source_class_means: np.ndarray    # D x classes, population means
    target_class_means: np.ndarray
    class_atoms: Tuple[np.ndarray, ...]
    class_signs: np.ndarray           # classes x sparsity
    classes: Tuple[str, ...]


class SampleDataGenerator:
    """Generates source, target and held-out target samples from one seed"""

    def __init__(self, config: SynthConfig = SynthConfig()):
        self.config = config
        self.rng = np.random.default_rng(config.seed)

    def _class_atoms(self) -> List[np.ndarray]:
        """Disjoint atom blocks when they fit, distinct random subsets otherwise"""
        cfg = self.config
        if cfg.n_classes * cfg.sparsity <= cfg.n_atoms:
            order = self.rng.permutation(cfg.n_atoms)
            return [np.sort(order[c * cfg.sparsity:(c + 1) * cfg.sparsity])
                    for c in range(cfg.n_classes)]

        if math.comb(cfg.n_atoms, cfg.sparsity) < cfg.n_classes:
            raise InvalidConfigError(
                f"only {math.comb(cfg.n_atoms, cfg.sparsity)} distinct {cfg.sparsity}-atom "
                f"subsets exist for {cfg.n_classes} classes")
        subsets: List[np.ndarray] = []
        seen = set()
        while len(subsets) < cfg.n_classes:
            subset = np.sort(self.rng.choice(cfg.n_atoms, size=cfg.sparsity, replace=False))
            key = tuple(int(a) for a in subset)
            if key not in seen:
                seen.add(key)
                subsets.append(subset)
        return subsets

    def _balanced_classes(self, count: int) -> np.ndarray:
        return self.rng.permutation(np.arange(count) % self.config.n_classes)

    def _draw_codes(self, class_ids: np.ndarray, atoms: List[np.ndarray],
                    signs: np.ndarray) -> np.ndarray:
        cfg = self.config
        codes = np.zeros((cfg.n_atoms, class_ids.size))
        magnitudes = self.rng.uniform(0.5, 1.5, size=(cfg.sparsity, class_ids.size))
        for j, c in enumerate(class_ids):
            codes[atoms[c], j] = signs[c] * magnitudes[:, j]
        return codes

    def _noise(self, count: int) -> np.ndarray:
        return self.config.noise * self.rng.standard_normal((self.config.n_features, count))

    def generate(self) -> Tuple[Dataset, Dataset, GroundTruth]:
        """
        Generate a training set (source then target samples) and a
        target-only test set

        Returns:
            Tuple of (train, test, ground_truth)
        """
        cfg = self.config
        names = tuple(f"class_{c}" for c in range(cfg.n_classes))

        dictionary = self.rng.standard_normal((cfg.n_features, cfg.n_atoms))
        dictionary /= np.linalg.norm(dictionary, axis=0)

        atoms = self._class_atoms()
        signs = self.rng.choice([-1.0, 1.0], size=(cfg.n_classes, cfg.sparsity))

        direction = self.rng.standard_normal(cfg.n_features)
        direction /= np.linalg.norm(direction)
        shift_vector = cfg.shift * direction

        source_classes = self._balanced_classes(cfg.n_source)
        target_classes = self._balanced_classes(cfg.n_target)
        test_classes = self._balanced_classes(cfg.n_test)

        source_codes = self._draw_codes(source_classes, atoms, signs)
        target_codes = self._draw_codes(target_classes, atoms, signs)
        test_codes = self._draw_codes(test_classes, atoms, signs)

        source_X = dictionary @ source_codes + self._noise(cfg.n_source)
        target_X = dictionary @ target_codes + shift_vector[:, None] + self._noise(cfg.n_target)
        test_X = dictionary @ test_codes + shift_vector[:, None] + self._noise(cfg.n_test)

        n_labeled = int(round(cfg.target_label_fraction * cfg.n_target))
        labeled_targets = set(
            int(j) for j in self.rng.choice(cfg.n_target, size=n_labeled, replace=False))

        # Magnitudes average 1, so a class mean code is its sign pattern
        source_means = np.column_stack([
            dictionary[:, atoms[c]] @ signs[c] for c in range(cfg.n_classes)
        ])
        target_means = source_means + shift_vector[:, None]

        train = Dataset(
            features=np.hstack([source_X, target_X]),
            domains=(Domain.SOURCE,) * cfg.n_source + (Domain.TARGET,) * cfg.n_target,
            labels=tuple(names[c] for c in source_classes) + tuple(
                names[c] if j in labeled_targets else None
                for j, c in enumerate(target_classes))
        )
        test = Dataset(
            features=test_X,
            domains=(Domain.TARGET,) * cfg.n_test,
            labels=tuple(names[c] for c in test_classes)
        )
        truth = GroundTruth(
            dictionary=dictionary,
            codes=np.hstack([source_codes, target_codes]),
            test_codes=test_codes,
            shift_vector=shift_vector,
            source_class_means=source_means,
            target_class_means=target_means,
            class_atoms=tuple(atoms),
            class_signs=signs,
            classes=names
        )
        return train, test, truth


def generate(config: SynthConfig = SynthConfig()) -> Tuple[Dataset, Dataset, GroundTruth]:
    """Generate (train, test, ground_truth) for a configuration"""
    return SampleDataGenerator(config).generate()
