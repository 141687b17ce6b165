#pragma once

#include "stretchy/errors.hpp"
#include "stretchy/numeric.hpp"
#include "stretchy/measure.hpp"
#include "stretchy/transform.hpp"
#include "stretchy/solver.hpp"
#include "stretchy/estimator.hpp"
#include "stretchy/variance.hpp"
#include "stretchy/data_io.hpp"
#include "stretchy/evaluation.hpp"
#include "stretchy/reports.hpp"
#include "stretchy/bench.hpp"
