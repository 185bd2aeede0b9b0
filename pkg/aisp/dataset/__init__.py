"""Annotation sets, cropping, augmentation and synthetic scenes."""
