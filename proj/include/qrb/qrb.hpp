#pragma once

// Umbrella header: noisy multiplexed-readout simulation, detector and
// state tomography, readout-quality metrics and the benchmark studies.

#include "qrb/core/matrix.hpp"
#include "qrb/core/povm.hpp"
#include "qrb/core/random.hpp"
#include "qrb/core/state.hpp"

#include "qrb/noise/channel.hpp"
#include "qrb/noise/sampling.hpp"
#include "qrb/noise/setting.hpp"
#include "qrb/noise/tetrahedron.hpp"

#include "qrb/tomo/bootstrap.hpp"
#include "qrb/tomo/qdt.hpp"
#include "qrb/tomo/qst.hpp"

#include "qrb/metrics/assignment.hpp"
#include "qrb/metrics/baseline.hpp"
#include "qrb/metrics/coherent.hpp"
#include "qrb/metrics/correlation.hpp"

#include "qrb/bench/budget.hpp"
#include "qrb/bench/correlation_study.hpp"
#include "qrb/bench/infidelity.hpp"
#include "qrb/bench/qrem.hpp"
#include "qrb/bench/scenario.hpp"

#include "qrb/io/config.hpp"
#include "qrb/io/csv.hpp"
#include "qrb/io/manifest.hpp"
#include "qrb/io/run.hpp"
#include "qrb/io/serialize.hpp"
#include "qrb/io/toml.hpp"
