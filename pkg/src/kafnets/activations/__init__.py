from .fixed import FixedActivation, RandomizedLeakyReLU, eval_fixed, grad_fixed
from .nonparametric import (
    APL,
    PAF,
    SAF,
    Maxout,
    apl_eval,
    apl_grad,
    maxout_eval,
    maxout_grad,
    paf_eval,
    paf_grad,
    saf_eval,
    saf_grad,
)
from .parametric import ParametricActivation, eval_parametric, grad_parametric, regularization_exempt

__all__ = [
    "APL", "PAF", "SAF", "FixedActivation", "Maxout", "ParametricActivation", "RandomizedLeakyReLU",
    "apl_eval", "apl_grad", "eval_fixed", "eval_parametric", "grad_fixed", "grad_parametric",
    "maxout_eval", "maxout_grad", "paf_eval", "paf_grad", "regularization_exempt", "saf_eval", "saf_grad",
]
