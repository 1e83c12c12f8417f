#pragma once

#include "polylin/analysis.hpp"
#include "polylin/core.hpp"
#include "polylin/errors.hpp"
#include "polylin/eval.hpp"
#include "polylin/expression.hpp"
#include "polylin/fit.hpp"
#include "polylin/functions.hpp"
#include "polylin/partition.hpp"
#include "polylin/quadrature.hpp"
#include "polylin/tridiagonal.hpp"
#include "polylin/vector.hpp"
