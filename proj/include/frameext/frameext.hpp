#pragma once

#include "frameext/domain.hpp"
#include "frameext/errors.hpp"
#include "frameext/experiments.hpp"
#include "frameext/expr.hpp"
#include "frameext/fourier_ops.hpp"
#include "frameext/grid.hpp"
#include "frameext/rng.hpp"
#include "frameext/solver.hpp"
#include "frameext/spectral.hpp"
#include "frameext/topology.hpp"
