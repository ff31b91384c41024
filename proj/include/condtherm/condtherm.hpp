#pragma once

// Umbrella header.
#include "condtherm/asymptotic.hpp"
#include "condtherm/convert.hpp"
#include "condtherm/core.hpp"
#include "condtherm/error.hpp"
#include "condtherm/lorenz.hpp"
#include "condtherm/lp.hpp"
#include "condtherm/numeric.hpp"
#include "condtherm/synth.hpp"
#include "condtherm/testkit.hpp"
