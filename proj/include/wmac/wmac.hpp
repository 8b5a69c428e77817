#pragma once

#include "wmac/config.hpp"
#include "wmac/dcf.hpp"
#include "wmac/fair_sched.hpp"
#include "wmac/frame.hpp"
#include "wmac/harness.hpp"
#include "wmac/mac_ext.hpp"
#include "wmac/medium.hpp"
#include "wmac/metrics.hpp"
#include "wmac/pcf.hpp"
#include "wmac/phy.hpp"
#include "wmac/rate_adapt.hpp"
#include "wmac/scenario.hpp"
#include "wmac/sim.hpp"
#include "wmac/simulation.hpp"
