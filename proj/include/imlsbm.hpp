// Copyright 2026 The imlsbm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IMLSBM_IMLSBM_HPP_
#define IMLSBM_IMLSBM_HPP_

#include "imlsbm/baseline.hpp"
#include "imlsbm/eigen_solver.hpp"
#include "imlsbm/error.hpp"
#include "imlsbm/estimate.hpp"
#include "imlsbm/experiment.hpp"
#include "imlsbm/io.hpp"
#include "imlsbm/kmeans.hpp"
#include "imlsbm/metrics.hpp"
#include "imlsbm/model.hpp"
#include "imlsbm/parallel.hpp"
#include "imlsbm/pipeline.hpp"
#include "imlsbm/random.hpp"
#include "imlsbm/rates.hpp"
#include "imlsbm/refine.hpp"
#include "imlsbm/spectral.hpp"

#endif  // IMLSBM_IMLSBM_HPP_
