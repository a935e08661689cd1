"""Deconvolution service package."""

from services.deconv_service.main import app

__all__ = ["app"]
