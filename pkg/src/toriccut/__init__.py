"""Toric cutting toolkit: exact polyhedral validation, canonical Kahler
potentials and metrics, cut-space point arithmetic, and contact-type
classification of cones, with a JSON/CSV command line front end."""

__version__ = "0.1.0"
