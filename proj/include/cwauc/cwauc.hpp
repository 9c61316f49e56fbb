#pragma once

#include "cwauc/contrast.hpp"
#include "cwauc/covariance.hpp"
#include "cwauc/data.hpp"
#include "cwauc/design.hpp"
#include "cwauc/errors.hpp"
#include "cwauc/estimators.hpp"
#include "cwauc/inference.hpp"
#include "cwauc/normal.hpp"
#include "cwauc/parallel.hpp"
#include "cwauc/simulation.hpp"
#include "cwauc/weight_measure.hpp"
