"""Routing laboratory for +grid LEO constellations: grid-based shortest-path
theory, 9-bit tag source routing, local fast reroute, and on-satellite path
validation, with link-state baselines and an experiment harness."""
