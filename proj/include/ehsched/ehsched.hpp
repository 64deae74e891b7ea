// SPDX-License-Identifier: Apache-2.0
#pragma once

// Offline transmit-power scheduling for an energy-harvesting node with a
// finite battery: maximum bits by a deadline, minimum completion time for a
// bit target, verification oracles, baselines, and scenario tooling. All
// types are immutable after construction and all operations are pure, so
// everything here is safe to call concurrently without coordination.

#include "ehsched/baselines.hpp"
#include "ehsched/battery.hpp"
#include "ehsched/errors.hpp"
#include "ehsched/oracle.hpp"
#include "ehsched/policy.hpp"
#include "ehsched/rate.hpp"
#include "ehsched/scenario.hpp"
#include "ehsched/scenario_io.hpp"
#include "ehsched/solver.hpp"
