// Copyright 2026 The Spectroscope Authors
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

#include "spectroscope/dissipation.hpp"
#include "spectroscope/errors.hpp"
#include "spectroscope/floquet.hpp"
#include "spectroscope/model.hpp"
#include "spectroscope/numerics/bessel.hpp"
#include "spectroscope/numerics/fourier.hpp"
#include "spectroscope/numerics/linalg.hpp"
#include "spectroscope/numerics/ode.hpp"
#include "spectroscope/peaks.hpp"
#include "spectroscope/perturbation.hpp"
#include "spectroscope/rwa.hpp"
#include "spectroscope/version.hpp"
