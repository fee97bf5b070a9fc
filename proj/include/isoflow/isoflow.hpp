#pragma once

// Umbrella header for the isoflow library.

#include "isoflow/catalog.hpp"
#include "isoflow/cli.hpp"
#include "isoflow/curvature.hpp"
#include "isoflow/flow.hpp"
#include "isoflow/invariants.hpp"
#include "isoflow/io.hpp"
#include "isoflow/linalg.hpp"
#include "isoflow/ode.hpp"
#include "isoflow/rank2.hpp"
#include "isoflow/root_system.hpp"
