#ifndef BEAMOPT_BEAMOPT_HPP
#define BEAMOPT_BEAMOPT_HPP

#include "beamopt/acquisition.hpp"
#include "beamopt/align.hpp"
#include "beamopt/baselines.hpp"
#include "beamopt/bench.hpp"
#include "beamopt/domain.hpp"
#include "beamopt/gp.hpp"
#include "beamopt/rng.hpp"
#include "beamopt/synth.hpp"

#endif  // BEAMOPT_BEAMOPT_HPP
