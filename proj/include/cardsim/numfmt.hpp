// Copyright (c) 2026, The cardsim Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <string>

namespace cardsim {

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace cardsim
