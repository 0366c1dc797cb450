"""Compiled kernels (built from _kernels.pyx when a toolchain is present)."""
