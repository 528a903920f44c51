#pragma once

// Umbrella header for the pilotwave numerical laboratory.

#include "pilotwave/analysis.hpp"
#include "pilotwave/config_io.hpp"
#include "pilotwave/grid.hpp"
#include "pilotwave/guidance.hpp"
#include "pilotwave/potential.hpp"
#include "pilotwave/propagator.hpp"
#include "pilotwave/report_io.hpp"
#include "pilotwave/sampling.hpp"
#include "pilotwave/scenario.hpp"
#include "pilotwave/scenario_run.hpp"
#include "pilotwave/wavefunction.hpp"
