#pragma once

#include "wl1/gaussian_kernels.hpp"
#include "wl1/model.hpp"
#include "wl1/roots.hpp"
#include "wl1/seeding.hpp"
#include "wl1/weights_opt.hpp"
#include "wl1/strategy.hpp"
#include "wl1/thresholds.hpp"
#include "wl1/subdiff_geometry.hpp"
#include "wl1/solver.hpp"
#include "wl1/experiments.hpp"
