#pragma once

// Umbrella header for the H-AP deployment planning library.

#include "hapdeploy/deploy.hpp"
#include "hapdeploy/energy.hpp"
#include "hapdeploy/errors.hpp"
#include "hapdeploy/grid.hpp"
#include "hapdeploy/mobility.hpp"
#include "hapdeploy/parallel.hpp"
#include "hapdeploy/random_walk.hpp"
#include "hapdeploy/report.hpp"
#include "hapdeploy/rng.hpp"
#include "hapdeploy/scenario_io.hpp"
#include "hapdeploy/simplex.hpp"
