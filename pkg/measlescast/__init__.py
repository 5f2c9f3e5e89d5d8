from . import __version__ as version_info
from .__version__ import __version_major__, __version_long__, __version__, __status__


from measlescast.main import main


__all__ = ["main", "__version__", "version_info"]
