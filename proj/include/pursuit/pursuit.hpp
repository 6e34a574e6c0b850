#pragma once

// Umbrella header for the pursuit library: forward OOMP with adaptive
// biorthogonalization, backward (BOOMP) coefficient shrinking, dictionary and
// signal generators, the least-squares verification oracle, and file I/O.

#include "pursuit/backward.hpp"
#include "pursuit/decomposition.hpp"
#include "pursuit/diagnostics.hpp"
#include "pursuit/dictgen.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/forward.hpp"
#include "pursuit/io.hpp"
#include "pursuit/oracle.hpp"
#include "pursuit/types.hpp"
