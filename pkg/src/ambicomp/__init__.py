"""Perceptual room compensation for Ambisonics playback in reverberant rooms."""

__version__ = "0.1.0"
