#pragma once
// Umbrella header.

#include "analytic.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "driver.hpp"
#include "error.hpp"
#include "fdtd.hpp"
#include "grid.hpp"
#include "kernel.hpp"
#include "medium.hpp"
#include "regdiff.hpp"
#include "representation.hpp"
#include "scenario.hpp"
#include "studies.hpp"
#include "skf_io.hpp"
#include "solve_config.hpp"
#include "source.hpp"
#include "validation.hpp"
