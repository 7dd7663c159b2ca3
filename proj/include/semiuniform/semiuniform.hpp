#pragma once

namespace semiuniform {
inline constexpr const char* kVersion = "0.1.0";
}

#include "error.hpp"
#include "real.hpp"
#include "parallel.hpp"
#include "contfrac.hpp"
#include "diophantine.hpp"
#include "alpha_factory.hpp"
#include "spectral.hpp"
#include "rates.hpp"
#include "phs.hpp"
#include "io.hpp"
#include "verify.hpp"
