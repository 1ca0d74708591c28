"""camcurate - camera-trajectory curation toolkit.

Filters camera trajectories for smoothness, classifies them against a
library of 50 canonical camera motions, and pairs trajectories that
share the same motion. Also carries the flow-matching, guidance and
rotary-position math used when conditioning video generation on camera
motion.
"""

__version__ = "0.1.0"
