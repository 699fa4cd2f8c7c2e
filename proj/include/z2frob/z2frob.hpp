// Copyright 2026 The z2frob Authors
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

#ifndef Z2FROB_Z2FROB_HPP
#define Z2FROB_Z2FROB_HPP

#include "chart.hpp"
#include "distribution.hpp"
#include "errors.hpp"
#include "expression.hpp"
#include "fields.hpp"
#include "frobenius.hpp"
#include "grading.hpp"
#include "linalg.hpp"
#include "series.hpp"

#endif  // Z2FROB_Z2FROB_HPP
