"""Limit cones of multi-Fuchsian surface group representations.

Modules: hyp2 (plane geometry), fricke (trace coordinates and Farey
slopes), polygons (right-angled polygon constructions), cone (hulls and
azimuthal certificates), wordgen (word clouds), and the CLI.
"""
__version__ = "0.1.0"
