#pragma once

#include "cbo/analysis/calyx.hpp"
#include "cbo/analysis/fit.hpp"
#include "cbo/analysis/oracles.hpp"
#include "cbo/analysis/sweep.hpp"
#include "cbo/analysis/verify.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/error.hpp"
#include "cbo/objective.hpp"
