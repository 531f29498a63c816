/**
 * @file cda.hpp
 * @brief Umbrella header for the nudging-based parameter estimation library.
 */
#pragma once

#include "cda/errors.hpp"
#include "cda/estimation.hpp"
#include "cda/fourier.hpp"
#include "cda/harness/config.hpp"
#include "cda/harness/config_file.hpp"
#include "cda/harness/experiment.hpp"
#include "cda/harness/presets.hpp"
#include "cda/harness/run_log.hpp"
#include "cda/integrators/coupled.hpp"
#include "cda/integrators/etdrk4.hpp"
#include "cda/integrators/rk4.hpp"
#include "cda/integrators/spectral.hpp"
#include "cda/models/concepts.hpp"
#include "cda/models/kse.hpp"
#include "cda/models/lorenz63.hpp"
#include "cda/models/lorenz96.hpp"
#include "cda/models/model_spec.hpp"
#include "cda/observation.hpp"
#include "cda/otf.hpp"
#include "cda/sensitivity_oracle.hpp"
#include "cda/types.hpp"
