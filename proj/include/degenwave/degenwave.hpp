#pragma once

#include "degenwave/core.hpp"
#include "degenwave/entropy.hpp"
#include "degenwave/errors.hpp"
#include "degenwave/grid.hpp"
#include "degenwave/initdata.hpp"
#include "degenwave/monitors.hpp"
#include "degenwave/solver.hpp"
#include "degenwave/test_function.hpp"
#include "degenwave/trajectory.hpp"
