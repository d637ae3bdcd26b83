#pragma once

// Umbrella header for the nonnegative tensor completion library.

#include "ntc/altmin.hpp"
#include "ntc/bench.hpp"
#include "ntc/exact_oracle.hpp"
#include "ntc/generator.hpp"
#include "ntc/io.hpp"
#include "ntc/ip_model.hpp"
#include "ntc/objective.hpp"
#include "ntc/observed.hpp"
#include "ntc/rng.hpp"
#include "ntc/separation.hpp"
#include "ntc/shape.hpp"
#include "ntc/simplex.hpp"
#include "ntc/solver.hpp"
#include "ntc/variant.hpp"
#include "ntc/vertex.hpp"
