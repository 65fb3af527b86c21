"""hexswitch: exact circuit switching on hexagonal programmable photonic meshes."""

__version__ = "0.1.0"
