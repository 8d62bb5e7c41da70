"""AI-native RAN simulation: data collection, model lifecycle, collaborative AI,
service assurance, energy saving and root-cause analysis on one event loop."""

__version__ = "0.1.0"
