#pragma once

// Umbrella header for the optimal-balance library: fast-slow toy model,
// slow-manifold series diagnostics, backward-forward nudging, shooting
// reference solver, oscillator oracle, and rate-fit helpers.

#include "optbal/bvp.hpp"
#include "optbal/config.hpp"
#include "optbal/csv.hpp"
#include "optbal/diagnostics.hpp"
#include "optbal/dual.hpp"
#include "optbal/errors.hpp"
#include "optbal/integrate.hpp"
#include "optbal/model.hpp"
#include "optbal/nudging.hpp"
#include "optbal/oracle.hpp"
#include "optbal/ramp.hpp"
#include "optbal/series.hpp"
#include "optbal/svg.hpp"
#include "optbal/vec.hpp"
