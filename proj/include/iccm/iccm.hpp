// SPDX-License-Identifier: Apache-2.0
//
// iccm - covariance-aided channel estimation for TDD/FDD massive MIMO arrays
// Copyright (C) 2026 The iccm authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef ICCM_ICCM_HPP
#define ICCM_ICCM_HPP

#include "iccm/angle_estimation.hpp"
#include "iccm/array_model.hpp"
#include "iccm/ccm_estimate.hpp"
#include "iccm/ccm_reconstruction.hpp"
#include "iccm/channel_synthesis.hpp"
#include "iccm/downlink_estimation.hpp"
#include "iccm/experiment.hpp"
#include "iccm/metrics.hpp"
#include "iccm/numerics.hpp"
#include "iccm/pas_estimation.hpp"
#include "iccm/random.hpp"
#include "iccm/scenario.hpp"
#include "iccm/scheduler.hpp"
#include "iccm/selftest.hpp"
#include "iccm/uplink_estimation.hpp"

#endif
