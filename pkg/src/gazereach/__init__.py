"""Deterministic simulator of a gaze-driven assistive reach-and-grasp pipeline.

Gaze samples are resolved to 3D scene points, fixations on intent zones are
decoded into action intents, an action grammar turns intents into executable
plans, and a simulated arm/glove carries the plans out under safety
monitoring. Everything is tick-driven and replayable.
"""

__version__ = "0.1.0"
