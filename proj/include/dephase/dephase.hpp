#ifndef DEPHASE_DEPHASE_HPP
#define DEPHASE_DEPHASE_HPP

#include "dephase/core.hpp"
#include "dephase/random.hpp"
#include "dephase/lattice_model.hpp"
#include "dephase/config.hpp"
#include "dephase/spectral.hpp"
#include "dephase/dephasing_signal.hpp"
#include "dephase/coarse_grain.hpp"
#include "dephase/observable_band.hpp"
#include "dephase/level_stats.hpp"
#include "dephase/analytic_models.hpp"

namespace dephase {
inline constexpr const char* kVersion = "0.1.0";
}

#endif // DEPHASE_DEPHASE_HPP
