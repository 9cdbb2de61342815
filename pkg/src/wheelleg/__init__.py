"""Morphology analysis toolkit for transformable wheel-legged humanoid robots.

Core library modules:

- :mod:`wheelleg.model` -- morphology definitions, file format, builtins
- :mod:`wheelleg.kinematics` -- FK, Jacobians, differential IK
- :mod:`wheelleg.workspace` -- Monte Carlo workspace and manipulability comparison
- :mod:`wheelleg.dynamics` -- inverse dynamics and energy evaluation
- :mod:`wheelleg.rewards` -- locomotion/transformation reward formulas
- :mod:`wheelleg.transform` -- mode transformation planning and state machine
- :mod:`wheelleg.turning` -- rigid-body turning simulator (lean compensation)

Service and clients:

- :mod:`wheelleg.service` -- FastAPI app exposing the analyses
- :mod:`wheelleg.cli` -- batch command line, a thin client of the service
"""

__version__ = "0.1.0"
