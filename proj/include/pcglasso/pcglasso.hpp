#pragma once

#include "pcglasso/errors.hpp"
#include "pcglasso/core.hpp"
#include "pcglasso/objective.hpp"
#include "pcglasso/block_solver.hpp"
#include "pcglasso/rng.hpp"
#include "pcglasso/descent.hpp"
#include "pcglasso/selection.hpp"
#include "pcglasso/metrics.hpp"
#include "pcglasso/simgen.hpp"
#include "pcglasso/univariate_mse.hpp"
#include "pcglasso/io.hpp"
#include "pcglasso/svg.hpp"
