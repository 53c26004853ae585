#pragma once

// Umbrella header: everything needed to build, verify and cost a
// distributed linearly separable computation scheme.

#include "lsc/assignment.hpp"
#include "lsc/bounds.hpp"
#include "lsc/field.hpp"
#include "lsc/matrix.hpp"
#include "lsc/params.hpp"
#include "lsc/rational.hpp"
#include "lsc/regimes.hpp"
#include "lsc/rng.hpp"
#include "lsc/scheme.hpp"
#include "lsc/serialize.hpp"
#include "lsc/sim.hpp"
