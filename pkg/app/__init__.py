from .structrl import __description__, __version__

__all__ = ["__version__", "__description__"]
