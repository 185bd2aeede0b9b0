"""
Setup script for AISP
Minimal shim; metadata and dependencies live in pyproject.toml
"""

from setuptools import setup, find_packages

setup(
    name="aisp",
    version="0.1.0",
    packages=find_packages(include=["aisp", "aisp.*"]),
    python_requires=">=3.10",
    install_requires=[
        # Core dependencies are in requirements.txt / pyproject.toml
    ],
    author="AISP Team",
    description="Amodal instance segmentation picking toolkit",
    long_description="Perception-to-action pipeline for occlusion-robust fruit harvesting",
)
