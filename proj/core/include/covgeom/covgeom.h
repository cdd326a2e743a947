#pragma once

#include "covgeom/barycenter.h"
#include "covgeom/bures.h"
#include "covgeom/error.h"
#include "covgeom/geometry.h"
#include "covgeom/rng.h"
#include "covgeom/simulate.h"
#include "covgeom/spectral.h"
#include "covgeom/tpca.h"

namespace covgeom {

inline constexpr const char* kVersion = "covgeom 0.1.0";

}  // namespace covgeom
