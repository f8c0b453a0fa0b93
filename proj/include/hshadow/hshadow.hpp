// Copyright 2026 The hshadow Authors
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

#pragma once

#include "hshadow/clifford.hpp"
#include "hshadow/config.hpp"
#include "hshadow/errors.hpp"
#include "hshadow/estimators.hpp"
#include "hshadow/hadamard.hpp"
#include "hshadow/oracle.hpp"
#include "hshadow/parallel.hpp"
#include "hshadow/qcore.hpp"
#include "hshadow/random.hpp"
#include "hshadow/runner.hpp"
#include "hshadow/shadows.hpp"
#include "hshadow/stats.hpp"
