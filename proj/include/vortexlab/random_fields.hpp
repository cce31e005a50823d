#pragma once

#include <random>

#include "vortexlab/metric.hpp"

namespace vortexlab {

using Rng = std::mt19937_64;

/// Random trigonometric polynomial with wavenumbers |k_i| ≤ modes.
GridFunction random_grid_function(const GridPtr& grid, Rng& rng, int modes = 3);

/// Random (k,l) form on the torus with band-limited coefficients.
FormField random_form(const TorusCalc& calc, int k, int l, Rng& rng, int modes = 3);

/// H = exp(A(x)) with A Hermitian and band-limited, |A| ≲ amplitude.
MetricField random_metric(const FlatBundle& bundle, const GridPtr& grid, Rng& rng, double amplitude = 0.3,
                          int modes = 2);

}  // namespace vortexlab
