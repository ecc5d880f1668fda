from importlib.metadata import version as _v, PackageNotFoundError
try:
    __version__ = _v("artifact")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.1.0"
