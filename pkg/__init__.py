"""
burstscale - NFV Auto-Scaling Simulator
Developed by Vision KC
"""

__version__ = "1.0.0"
__author__ = "Vision KC"
__description__ = "Packet-level simulator for microsecond-scale NFV auto-scaling"
