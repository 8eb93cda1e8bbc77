// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header for the IRS wideband simulator.

#pragma once

#include "irs/analytic.hpp"
#include "irs/channel.hpp"
#include "irs/circuit.hpp"
#include "irs/common.hpp"
#include "irs/experiments.hpp"
#include "irs/fit.hpp"
#include "irs/optimizer.hpp"
#include "irs/simplex.hpp"
