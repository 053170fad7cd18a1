#pragma once

#include "ots/balance.hpp"
#include "ots/constraints.hpp"
#include "ots/error.hpp"
#include "ots/fixtures.hpp"
#include "ots/graph.hpp"
#include "ots/grid_model.hpp"
#include "ots/harness.hpp"
#include "ots/milp_model.hpp"
#include "ots/random.hpp"
#include "ots/reduction.hpp"
#include "ots/simplex.hpp"
#include "ots/solver.hpp"
#include "ots/variants.hpp"
#include "ots/verify.hpp"
