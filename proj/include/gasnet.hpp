#pragma once

#include "gasnet/compressor.hpp"
#include "gasnet/error.hpp"
#include "gasnet/front_tracking.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/lax_curves.hpp"
#include "gasnet/newton.hpp"
#include "gasnet/output.hpp"
#include "gasnet/riemann.hpp"
#include "gasnet/run.hpp"
#include "gasnet/scenario.hpp"
#include "gasnet/thermo.hpp"
