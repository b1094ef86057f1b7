"""
Force models shipped with the package
"""
from photon_scintillation.api.force_models.diffusion import WhiteNoiseDiffusion
from photon_scintillation.api.force_models.frozen import FrozenScreens
