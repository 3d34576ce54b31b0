// Copyright 2026 The pfrlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "pfr/audit.hpp"
#include "pfr/canonical.hpp"
#include "pfr/decoder.hpp"
#include "pfr/field.hpp"
#include "pfr/linalg.hpp"
#include "pfr/mds.hpp"
#include "pfr/params.hpp"
#include "pfr/protocol.hpp"
#include "pfr/query.hpp"
#include "pfr/query_matrix.hpp"
#include "pfr/shard_io.hpp"
#include "pfr/table_format.hpp"
#include "pfr/virtual_space.hpp"
#include "pfr/wire.hpp"
