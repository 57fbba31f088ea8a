"""Beam discovery for mm-wave links using measurement designs from linear block codes."""

from .channel import AngularChannel, ArrayGeometry, ChannelMatrix, PathCluster, sample_channel
from .codes import LinearCode, get_code, registry_keys
from .discovery import DiscoveryPlan, discover, plan
from .gf2 import BinMatrix
from .harness import MetricsRecord, ScenarioConfig, run_scenario
from .measurement import QuantizerSpec

__version__ = "0.1.0"
