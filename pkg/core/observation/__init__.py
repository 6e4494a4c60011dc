from .builder import extract_neighbors, normalize, quantize, encode_bins, observe

__all__ = ["extract_neighbors", "normalize", "quantize", "encode_bins", "observe"]
