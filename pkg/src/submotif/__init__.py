"""Sublinear motif counting and sampling in the standard graph query model."""
