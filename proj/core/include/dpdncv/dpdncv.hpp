#pragma once

#include "dpdncv/error_model.hpp"
#include "dpdncv/errors.hpp"
#include "dpdncv/numeric.hpp"
#include "dpdncv/objective.hpp"
#include "dpdncv/parallel.hpp"
#include "dpdncv/penalty.hpp"
#include "dpdncv/rng.hpp"
#include "dpdncv/robustness.hpp"
#include "dpdncv/simbench.hpp"
#include "dpdncv/solver.hpp"
#include "dpdncv/tuning.hpp"
#include "dpdncv/types.hpp"
