#pragma once

// Umbrella header for the whole library.

#include "lpp/airy.hpp"
#include "lpp/contour.hpp"
#include "lpp/dlpp.hpp"
#include "lpp/finite_density.hpp"
#include "lpp/identity_lab.hpp"
#include "lpp/limit_density.hpp"
#include "lpp/multilinear.hpp"
#include "lpp/parallel.hpp"
#include "lpp/report.hpp"
#include "lpp/rng.hpp"
#include "lpp/series_engine.hpp"
