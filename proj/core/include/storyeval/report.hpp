// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "storyeval/aggregate.hpp"

namespace storyeval {

/// Fixed four-decimal rendering used by every table.
std::string format_score(double v);

/// Columns: Model, Visual Grounding, Coherence, Non-Redundancy, d_HM. Rows
/// follow the ranking.
std::string render_markdown(const Leaderboard& board);
std::string render_csv(const Leaderboard& board);
nlohmann::json leaderboard_json(const Leaderboard& board);
std::string render_json(const Leaderboard& board);

/// Per-model dHM in ranking order, for bar charts.
std::string render_distance_series_csv(const Leaderboard& board);

/// Every per-story breakdown.
std::string render_breakdowns_csv(const Leaderboard& board);

} // namespace storyeval
