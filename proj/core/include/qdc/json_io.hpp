// Copyright 2026 The qdecouple Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qdc/channel.hpp"
#include "qdc/linalg.hpp"

namespace qdc {

using json = nlohmann::json;

/// {"re": [[...]], "im": [[...]]}, row-major.
json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

/// {"dims": [{"label": "A", "dim": 2}, ...], "matrix": {...}}
json state_to_json(const StateOperator& s);
/// Validates every StateOperator invariant; throws Error on violation.
StateOperator state_from_json(const json& j);

/// {"dim_in": n, "dim_out": m, "choi": <state>}
json channel_to_json(const Channel& ch);
Channel channel_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace qdc
