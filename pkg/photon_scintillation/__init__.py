"""
For convenience of use this module re-exports everything from the .api package
"""
from photon_scintillation.__version__ import __version__
from photon_scintillation.api import *
