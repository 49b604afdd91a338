"""单层/双层石墨烯广义相干态数值库。"""

__version__ = "0.1.0"
