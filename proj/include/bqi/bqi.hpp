#pragma once

// Umbrella header: implicitization of biquadratic Bezier triangle and quad
// patches via the Dixon/Cayley resultant, and the applications built on it.

#include "bqi/apps.hpp"
#include "bqi/core.hpp"
#include "bqi/dixon.hpp"
#include "bqi/expand.hpp"
#include "bqi/geometry.hpp"
#include "bqi/io.hpp"
#include "bqi/normalize.hpp"
#include "bqi/numeric.hpp"
#include "bqi/poly4.hpp"
#include "bqi/rational.hpp"
#include "bqi/slp.hpp"
#include "bqi/trivariate.hpp"
