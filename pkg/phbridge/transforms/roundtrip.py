from __future__ import annotations

import logging
from typing import NamedTuple

from phbridge.core.tolerance import TolerancePolicy
from phbridge.systems.descriptor import DescriptorPH, require_descriptor
from phbridge.systems.geometric import GeometricPH
from phbridge.transforms.desc_to_geo import GeoMaps, descriptor_to_geometric
from phbridge.transforms.geo_to_desc import LiftData, geometric_to_descriptor

logger = logging.getLogger(__name__)


class Roundtrip(NamedTuple):
    """Both stages of descriptor → geometric → descriptor."""

    geometric: GeometricPH
    maps: GeoMaps
    descriptor: DescriptorPH
    lift: LiftData


def compose_roundtrip(dsys: DescriptorPH, tol: TolerancePolicy | None = None) -> Roundtrip:
    gph, maps = descriptor_to_geometric(dsys, tol)
    out, lift = geometric_to_descriptor(gph, tol)
    require_descriptor(out)
    logger.info(
        "roundtrip: state dimension %d -> %d (Q = I)", dsys.n, out.n
    )
    return Roundtrip(geometric=gph, maps=maps, descriptor=out, lift=lift)


def roundtrip_q_identity(dsys: DescriptorPH, tol: TolerancePolicy | None = None) -> DescriptorPH:
    """An equivalent pH descriptor system with ``Q = I``.

    Raises:
        KernelOverlap: ``ker E ∩ ker Q ≠ {0}``.
    """
    return compose_roundtrip(dsys, tol).descriptor
