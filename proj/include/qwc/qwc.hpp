#pragma once

// Umbrella header for the waveform-conversion toolkit.

#include "qwc/analysis.hpp"
#include "qwc/chirp.hpp"
#include "qwc/dechirp.hpp"
#include "qwc/errors.hpp"
#include "qwc/escort.hpp"
#include "qwc/fft.hpp"
#include "qwc/grid.hpp"
#include "qwc/io.hpp"
#include "qwc/materials.hpp"
#include "qwc/math.hpp"
#include "qwc/parallel.hpp"
#include "qwc/perturb.hpp"
#include "qwc/photon_stats.hpp"
#include "qwc/propagate.hpp"
#include "qwc/quadrature.hpp"
#include "qwc/qwc_version.hpp"
#include "qwc/waveform.hpp"
