"""Memory-capacity upper bounds for 1-hidden-layer treelike committee machines.

Computes the n-scaled storage-capacity upper bound of networks with
linear, quadratic or ReLU hidden activations, for any even hidden width,
via the plain random-duality threshold 1/E z and its partially lifted
saddle-point refinement.
"""

from .bounds_plrdt import (SaddleDiagnostics, i_q, i_sph, phi_bar,
                           plrdt_capacity)
from .bounds_rdt import (CapacityBound, quad_capacity_closed_form,
                         rdt_capacity, relu_I1_I2)
from .config import DEFAULT_CONFIG, DomainError, NumericsConfig
from .kernels import (KernelResult, expected_z, z_linear, z_quad, z_quad_chi,
                      z_relu_batch, z_relu_d2, z_relu_general, z_relu_oracle)
from .montecarlo import MCConfig, estimate_mean, gaussian_vector
from .quadrature import (EstimateWithError, QuadratureConfig, integrate_1d,
                         integrate_2d_triangular)

__version__ = "0.1.0"

__all__ = [
    "CapacityBound", "DEFAULT_CONFIG", "DomainError", "EstimateWithError",
    "KernelResult", "MCConfig", "NumericsConfig", "QuadratureConfig",
    "SaddleDiagnostics", "__version__", "estimate_mean", "expected_z",
    "gaussian_vector", "i_q", "i_sph", "integrate_1d",
    "integrate_2d_triangular", "phi_bar", "plrdt_capacity",
    "quad_capacity_closed_form", "rdt_capacity", "relu_I1_I2", "z_linear",
    "z_quad", "z_quad_chi", "z_relu_batch", "z_relu_d2", "z_relu_general",
    "z_relu_oracle",
]
