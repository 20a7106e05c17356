"""Threshold speeds and travelling wavefronts for degenerate reaction-diffusion-convection equations"""

__version__ = "0.1.0"
