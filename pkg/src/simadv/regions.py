"""Connected adversarial regions on a lattice.

Around a found adversarial point we lay a uniform lattice (the seed is the
origin; each lattice point is seed + spacing * integer offsets) and flood
outward: pop a point off a stack, evaluate it, and when its loss exceeds the
threshold keep it and push its 2n axis neighbors. Offsets are exact integer
arithmetic, so set membership never suffers floating-point drift; realized
coordinates are computed one way everywhere (realize()).

Out-of-domain lattice points are never pushed: the domain boundary acts as
the region boundary. A cap on total evaluations bounds runs whose
adversarial set is large; hitting it marks the region truncated.

brute_force_region is the independent oracle: it evaluates every in-domain
lattice point and labels connected components breadth-first. Flooding from
a seed must reproduce exactly the component containing that seed.
"""
from dataclasses import dataclass

import numpy as np

from .errors import (
    NonAdversarialSeed,
    OracleFault,
    RegionAborted,
    SimadvError,
)


@dataclass(frozen=True)
class RegionGridSpec:
    spacing: float
    seed_params: np.ndarray
    domain: object
    cap: int = 100_000

    def __post_init__(self):
        if not self.spacing > 0:
            raise SimadvError(f"spacing must be > 0, got {self.spacing!r}")
        if self.cap < 1:
            raise SimadvError("cap must be >= 1")
        seed = np.asarray(self.seed_params, dtype=np.float64)
        object.__setattr__(self, "seed_params", seed)
        if not self.domain.contains(seed):
            raise SimadvError("seed_params must lie inside the domain")


def neighbors(coord):
    """The 2n unit-offset lattice neighbors of an integer coordinate."""
    out = []
    for axis in range(len(coord)):
        for step in (1, -1):
            nb = list(coord)
            nb[axis] += step
            out.append(tuple(nb))
    return out


def realize(spec, coord):
    """Parameter vector of a lattice coordinate."""
    return spec.seed_params + spec.spacing * np.asarray(coord, dtype=np.float64)


@dataclass
class AdversarialRegion:
    members: dict  # coord tuple -> loss
    spacing: float
    seed_params: np.ndarray
    threshold: float
    truncated: bool
    evaluations: int

    @property
    def seed_coord(self):
        return (0,) * len(self.seed_params)

    def coords(self):
        return set(self.members)

    def __len__(self):
        return len(self.members)


def flood_region(sut, spec, threshold):
    """Stack-driven flood fill seeded at an adversarial point.

    The seed is evaluated first and must be adversarial. Every lattice point
    is evaluated at most once (points are marked visited when pushed).
    """
    n = spec.domain.dims
    origin = (0,) * n

    evaluations = 0
    members = {}

    def eval_coord(coord):
        nonlocal evaluations
        evaluations += 1
        return sut.loss(realize(spec, coord))

    seed_loss = eval_coord(origin)
    if not seed_loss > threshold:
        raise NonAdversarialSeed(
            f"seed loss {seed_loss!r} is not above threshold {threshold!r}"
        )
    members[origin] = seed_loss

    visited = {origin}
    stack = []

    def push_unvisited_neighbors(coord):
        for nb in neighbors(coord):
            if nb not in visited and spec.domain.contains(realize(spec, nb)):
                visited.add(nb)
                stack.append(nb)

    push_unvisited_neighbors(origin)

    truncated = False
    while stack:
        if evaluations >= spec.cap:
            truncated = True
            break
        coord = stack.pop()
        try:
            loss = eval_coord(coord)
        except OracleFault as exc:
            partial = AdversarialRegion(members, spec.spacing, spec.seed_params,
                                        threshold, True, evaluations)
            raise RegionAborted(f"oracle fault during flood: {exc}", partial) from exc
        if loss > threshold:
            members[coord] = loss
            push_unvisited_neighbors(coord)

    return AdversarialRegion(members, spec.spacing, spec.seed_params, threshold,
                             truncated, evaluations)


_ENUMERATION_LIMIT = 50_000_000


def _lattice_coords(spec):
    """All integer offsets whose realized points are in-domain.

    Candidate ranges are slightly over-approximated, then filtered with the
    same contains() test the flood uses, so both sides agree on boundary
    points exactly.
    """
    domain = spec.domain
    seed = spec.seed_params
    los, his = [], []
    total = 1
    for i in range(domain.dims):
        lo = int(np.ceil((domain.lower[i] - seed[i]) / spec.spacing)) - 1
        hi = int(np.floor((domain.upper[i] - seed[i]) / spec.spacing)) + 1
        los.append(lo)
        his.append(hi)
        total *= hi - lo + 1
        if total > _ENUMERATION_LIMIT:
            raise SimadvError(
                f"lattice has more than {_ENUMERATION_LIMIT} candidate points; "
                "use a coarser spacing or a smaller domain"
            )
    axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in zip(los, his)]
    mesh = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([m.ravel() for m in mesh], axis=1)
    points = seed + spec.spacing * coords.astype(np.float64)
    inside = domain.contains_batch(points)
    return coords[inside], points[inside]


def brute_force_region(sut, spec, threshold):
    """Exhaustive oracle: evaluate every in-domain lattice point and label
    the adversarial ones into connected components (2n-neighbor relation,
    breadth-first). Returns a list of components, each a dict coord -> loss,
    ordered by their lexicographically smallest coordinate."""
    coords, points = _lattice_coords(spec)
    losses = sut.loss_batch(points)
    adv = losses > threshold

    loss_by_coord = {
        tuple(int(x) for x in coords[k]): float(losses[k])
        for k in np.flatnonzero(adv)
    }

    unvisited = set(loss_by_coord)
    components = []
    # deterministic sweep order
    for start in sorted(loss_by_coord):
        if start not in unvisited:
            continue
        comp = {}
        queue = [start]
        unvisited.discard(start)
        head = 0
        while head < len(queue):
            coord = queue[head]
            head += 1
            comp[coord] = loss_by_coord[coord]
            for nb in neighbors(coord):
                if nb in unvisited:
                    unvisited.discard(nb)
                    queue.append(nb)
        components.append(comp)
    components.sort(key=lambda comp: min(comp))
    return components


def component_containing(components, coord):
    """The component holding ``coord``, or None."""
    for comp in components:
        if coord in comp:
            return comp
    return None
