// Copyright 2026 The ceqlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Umbrella header.

#ifndef CEQLAB_CEQLAB_HPP_
#define CEQLAB_CEQLAB_HPP_

#include "ceqlab/adam.hpp"
#include "ceqlab/cli.hpp"
#include "ceqlab/distribution.hpp"
#include "ceqlab/environment.hpp"
#include "ceqlab/equilibrium.hpp"
#include "ceqlab/errors.hpp"
#include "ceqlab/estimation.hpp"
#include "ceqlab/game.hpp"
#include "ceqlab/game_io.hpp"
#include "ceqlab/lp.hpp"
#include "ceqlab/orchestrator.hpp"
#include "ceqlab/policy_net.hpp"
#include "ceqlab/rng.hpp"
#include "ceqlab/sampling.hpp"
#include "ceqlab/training.hpp"
#include "ceqlab/validation.hpp"

#endif  // CEQLAB_CEQLAB_HPP_
