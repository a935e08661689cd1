"""Test suite for the noisy blind deconvolution library."""
