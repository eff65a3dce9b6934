"""Spiking neural P systems: static model and discrete-time engine."""
