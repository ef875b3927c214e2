// Copyright 2026 The gsurf Authors
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

#pragma once

// Umbrella header for the gsurf library.

#include "gsurf/atlas.hpp"
#include "gsurf/canonical.hpp"
#include "gsurf/conversion.hpp"
#include "gsurf/count.hpp"
#include "gsurf/engine.hpp"
#include "gsurf/frequency.hpp"
#include "gsurf/graph.hpp"
#include "gsurf/int_matrix.hpp"
#include "gsurf/lattice.hpp"
#include "gsurf/oracle.hpp"
#include "gsurf/output.hpp"
#include "gsurf/small_graph.hpp"
