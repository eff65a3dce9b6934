"""Spiking neural P system workbench."""
