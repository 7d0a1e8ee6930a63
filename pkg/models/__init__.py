from .dataset import LabeledDataset
from .latent import LatentCode
from .params import DecouplerParams, ParamSet, ParamTensors
from .gaussian import GaussianClassModel
from .sanitized import SanitizedDataset
