// Copyright 2026 The chorgame Authors
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

#ifndef CHORGAME_CHORGAME_HPP
#define CHORGAME_CHORGAME_HPP

#include "chorgame/coalition_cost.hpp"
#include "chorgame/energy.hpp"
#include "chorgame/game.hpp"
#include "chorgame/instance.hpp"
#include "chorgame/report.hpp"
#include "chorgame/schedule.hpp"
#include "chorgame/stability.hpp"
#include "chorgame/sum_completion.hpp"

#endif  // CHORGAME_CHORGAME_HPP
