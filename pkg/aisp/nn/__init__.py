"""Dense tensors, attention/SPPF/head blocks, losses and their gradient checks."""
