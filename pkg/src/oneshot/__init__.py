"""Reshaped space-filling designs for one-shot optimization."""
__version__ = "0.1.0"

from .methods import SamplerSpec, generate, parse_method_spec
from .reshaping import ReshapeSpec, meta_lambda
from .sequences import Base, gen_base, scramble

__all__ = ["SamplerSpec", "ReshapeSpec", "Base", "generate", "parse_method_spec",
           "meta_lambda", "gen_base", "scramble", "__version__"]
