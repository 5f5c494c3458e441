#pragma once

#include "degenwave/harness/commands.hpp"
#include "degenwave/harness/config.hpp"
#include "degenwave/harness/report.hpp"
#include "degenwave/harness/setup.hpp"
