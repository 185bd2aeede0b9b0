"""
AISP - Amodal Instance Segmentation Picking

Occlusion-robust perception-to-action toolkit: attention and loss blocks with
gradient verification, distance-transform picking points, camera-to-base
localisation and grasp planning, and the detection / harvest evaluation stack.
"""

__version__ = "0.1.0"
__schema_version__ = "1.0.0"
__author__ = "AISP Team"

# Package metadata
PACKAGE_NAME = "aisp"
PROJECT_NAME = "AISP"
