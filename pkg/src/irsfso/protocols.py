"""Sharing one IRS among several source/receiver pairs.

* ``TD``: time division, one pair per slot, the whole surface is one tile;
* ``IRSD``: one tile per pair, beam footprint and lens centered on it;
* ``IRSH``: many small tiles, each assigned to one pair.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .beam import BeamParams, incident_frame
from .geometry import LinkGeometry
from .irs import IrsLayout, ProfileKind, Tile, build_layout, lp_profile, passivity_factor, qp_profile


class ProtocolKind(enum.Enum):
    TD = "td"
    IRSD = "irsd"
    IRSH = "irsh"


class Ownership(enum.Enum):
    """IRSH tile-to-pair rule."""

    NEAREST = "nearest"  # nearest nominal footprint center, ties to lower index
    INTERLEAVED = "interleaved"  # checkerboard-like round robin over the grid


IRSH_MIN_TILES_PER_PAIR = 4


@dataclass(frozen=True)
class ProtocolAssignment:
    """Tile configuration per time slot plus per-pair placements.

    ``links[m]`` is the desired link of pair ``m`` (source ``m`` to receiver
    ``m``) with its footprint and lens centers on the IRS. ``slots[t]`` holds
    the tiles configured during slot ``t`` and ``active[t]`` the pairs that
    transmit in it.
    """

    kind: ProtocolKind
    links: tuple
    slots: tuple
    active: tuple
    profile_kind: ProfileKind
    zeta0: float = 1.0

    @property
    def n_pairs(self) -> int:
        return len(self.links)

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    def slot_of(self, pair: int) -> int:
        for t, act in enumerate(self.active):
            if pair in act:
                return t
        raise KeyError(pair)

    def tile_owner(self, slot: int = 0) -> tuple:
        return tuple(t.owner for t in self.slots[slot])

    def cross_link(self, m: int, n: int) -> LinkGeometry:
        """Link from source ``m`` to receiver ``n``."""
        src, dst = self.links[m], self.links[n]
        return LinkGeometry(src.ls, dst.pd, dst.lens_radius, src.footprint_center, dst.lens_center)

    def misalignment(self, pair: int) -> float:
        return self.links[pair].misalignment


def _profile_for(link: LinkGeometry, center, beam: BeamParams, profile_kind: ProfileKind):
    if profile_kind is ProfileKind.LP:
        return lp_profile(link.ls, link.pd, center, link.footprint_center)
    frame = incident_frame(beam, link.ls, link.footprint_center)
    return qp_profile(link.ls, link.pd, frame, center)


def _make_tile(center, lx, ly, link, beam, profile_kind, owner, zeta0):
    prof = _profile_for(link, center, beam, profile_kind)
    return Tile(tuple(center), lx, ly, prof, zeta0, passivity_factor(link.pd.theta), owner)


def _beams(beams, n):
    if isinstance(beams, BeamParams):
        return [beams] * n
    beams = list(beams)
    if len(beams) != n:
        raise ValueError("one beam per pair required")
    return beams


def irsh_owners(layout: IrsLayout, footprints, rule: Ownership = Ownership.NEAREST):
    """Owner index of every tile of ``layout``."""
    n = len(footprints)
    owners = []
    for idx, c in enumerate(layout.centers):
        if rule is Ownership.INTERLEAVED:
            i, j = idx % layout.qx, idx // layout.qx
            owners.append((i + j) % n)
        else:
            dist = [math.hypot(c[0] - f[0], c[1] - f[1]) for f in footprints]
            best = min(dist)
            owners.append(next(m for m, v in enumerate(dist) if math.isclose(v, best, rel_tol=1e-12, abs_tol=1e-12)))
    return owners


def build_assignment(kind, links, layout: IrsLayout, beams, profile_kind=ProfileKind.LP, zeta0: float = 1.0, ownership=Ownership.NEAREST) -> ProtocolAssignment:
    """Configure the IRS for the pairs in ``links``.

    For ``TD`` ``layout`` only provides the total surface. For ``IRSD`` the
    footprint and lens centers of pair ``m`` are moved onto tile ``m``. For
    ``IRSH`` the nominal placements of ``links`` are kept and the tiles are
    distributed by ``ownership``.
    """
    kind = ProtocolKind(kind)
    profile_kind = ProfileKind(profile_kind)
    ownership = Ownership(ownership)
    links = list(links)
    n = len(links)
    if n < 1:
        raise ValueError("at least one pair required")
    beams = _beams(beams, n)
    if kind is ProtocolKind.TD:
        origin = (0.0, 0.0, 0.0)
        links = [replace(l, footprint_center=origin, lens_center=origin) for l in links]
        slots = tuple(
            (_make_tile(origin, layout.total_x, layout.total_y, links[m], beams[m], profile_kind, m, zeta0),) for m in range(n)
        )
        return ProtocolAssignment(kind, tuple(links), slots, tuple((m,) for m in range(n)), profile_kind, zeta0)
    if kind is ProtocolKind.IRSD:
        if len(layout) != n:
            raise ValueError(f"tile-count mismatch: IRSD needs {n} tiles, layout has {len(layout)}")
        links = [replace(l, footprint_center=layout.centers[m], lens_center=layout.centers[m]) for m, l in enumerate(links)]
        tiles = tuple(
            _make_tile(layout.centers[m], layout.lx, layout.ly, links[m], beams[m], profile_kind, m, zeta0) for m in range(n)
        )
        return ProtocolAssignment(kind, tuple(links), (tiles,), (tuple(range(n)),), profile_kind, zeta0)
    if len(layout) < IRSH_MIN_TILES_PER_PAIR * n:
        raise ValueError(f"tile-count mismatch: IRSH needs at least {IRSH_MIN_TILES_PER_PAIR * n} tiles")
    owners = irsh_owners(layout, [l.footprint_center for l in links], ownership)
    # every tile of a pair shares one profile centered on its footprint, so
    # the tiles act as pieces of a single surface focused on that pair
    tiles = tuple(
        Tile(tuple(c), layout.lx, layout.ly, _profile_for(links[o], links[o].footprint_center, beams[o], profile_kind), zeta0, passivity_factor(links[o].pd.theta), o)
        for c, o in zip(layout.centers, owners)
    )
    return ProtocolAssignment(kind, tuple(links), (tiles,), (tuple(range(n)),), profile_kind, zeta0)


def apply_misalignment(assign: ProtocolAssignment, pair: int, offset) -> ProtocolAssignment:
    """Shift the footprint center of ``pair`` by ``offset`` (in the IRS
    plane) while leaving every tile profile untouched."""
    offset = np.asarray(offset, dtype=float)
    if offset.shape != (3,) or offset[2] != 0:
        raise ValueError("offset must be a 3-vector in the IRS plane")
    links = list(assign.links)
    l = links[pair]
    links[pair] = replace(l, footprint_center=tuple(np.add(l.footprint_center, offset).tolist()))
    return replace(assign, links=tuple(links))


def interference_tiles(assign: ProtocolAssignment, m: int, n: int):
    """Tiles that reflect source ``m`` while it transmits, or ``None`` if
    ``m`` and receiver ``n`` never share a slot."""
    t = assign.slot_of(m)
    if n not in assign.active[t]:
        return None
    return assign.slots[t]
