/*
 * Copyright 2026 The onevar Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "onevar/cgs.hpp"
#include "onevar/embedding.hpp"
#include "onevar/errors.hpp"
#include "onevar/formula.hpp"
#include "onevar/io.hpp"
#include "onevar/kripke.hpp"
#include "onevar/parser.hpp"
#include "onevar/random.hpp"
#include "onevar/satsearch.hpp"
#include "onevar/state_set.hpp"
#include "onevar/verify.hpp"
