/**
 * Umbrella header for the composite-smooth-control trajectory library.
 */

#pragma once

#include "csc/control.hpp"
#include "csc/costate.hpp"
#include "csc/dynamics.hpp"
#include "csc/elements.hpp"
#include "csc/engine.hpp"
#include "csc/ephemeris.hpp"
#include "csc/errors.hpp"
#include "csc/output.hpp"
#include "csc/power.hpp"
#include "csc/rk.hpp"
#include "csc/runner.hpp"
#include "csc/scenario.hpp"
#include "csc/shooting.hpp"
#include "csc/units.hpp"
#include "csc/vec.hpp"
