# See LICENSE.txt for licensing terms

# TODO: Switch to 'importlib.metadata' once Python 3.7 support is dropped
import importlib_metadata

try:
    version = importlib_metadata.version('flashbench')
except importlib_metadata.PackageNotFoundError:
    version = None
