// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#include "storyeval/report.hpp"

#include <cmath>
#include <cstdio>

namespace storyeval {

using nlohmann::json;

namespace {

constexpr const char* kColumns[] = {"Model", "Visual Grounding", "Coherence", "Non-Redundancy", "d_HM"};

std::string csv_field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s)
{
  std::string out;
  for (char c : s) {
    if (c == '|')
      out += '\\';
    out += c;
  }
  return out;
}

double round4(double v)
{
  const double r = std::round(v * 1e4) / 1e4;
  return r == 0.0 ? 0.0 : r;
}

} // namespace

std::string format_score(double v)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s(buf);
  if (s == "-0.0000")
    s = "0.0000";
  return s;
}

std::string render_markdown(const Leaderboard& board)
{
  std::string out = "|";
  for (const char* c : kColumns)
    out += std::string(" ") + c + " |";
  out += "\n|---|---:|---:|---:|---:|\n";
  for (const auto& r : board.rows) {
    out += "| " + md_cell(r.model_id) + " | " + format_score(r.G) + " | " + format_score(r.C) + " | " +
           format_score(r.R) + " | " + format_score(r.dHM) + " |\n";
  }
  out += "\nd_HM: " + std::string(describe(board.aggregation)) + " (" + std::string(to_string(board.aggregation)) +
         "); lower is closer to human. Stories: " + std::to_string(board.story_ids.size()) +
         ", excluded: " + std::to_string(board.excluded_story_ids.size()) + ".\n";
  for (const auto& n : board.notes)
    out += n + "\n";
  return out;
}

std::string render_csv(const Leaderboard& board)
{
  std::string out;
  for (std::size_t i = 0; i < std::size(kColumns); ++i)
    out += (i ? "," : "") + std::string(kColumns[i]);
  out += '\n';
  for (const auto& r : board.rows)
    out += csv_field(r.model_id) + "," + format_score(r.G) + "," + format_score(r.C) + "," + format_score(r.R) +
           "," + format_score(r.dHM) + "\n";
  return out;
}

json leaderboard_json(const Leaderboard& board)
{
  auto row_json = [](const LeaderboardRow& r) {
    return json{{"model", r.model_id},
                {"visual_grounding", round4(r.G)},
                {"coherence", round4(r.C)},
                {"non_redundancy", round4(r.R)},
                {"d_hm", round4(r.dHM)},
                {"stories", r.stories},
                {"rank", r.rank}};
  };
  json rows = json::array();
  for (const auto& r : board.rows)
    rows.push_back(row_json(r));
  json human = row_json(board.human);
  human.erase("rank");
  human.erase("d_hm");
  return json{{"aggregation", to_string(board.aggregation)},
              {"aggregation_label", describe(board.aggregation)},
              {"columns", kColumns},
              {"rows", std::move(rows)},
              {"human", std::move(human)},
              {"stories", board.story_ids.size()},
              {"excluded_story_ids", board.excluded_story_ids},
              {"notes", board.notes}};
}

std::string render_json(const Leaderboard& board)
{
  return leaderboard_json(board).dump(2) + "\n";
}

std::string render_distance_series_csv(const Leaderboard& board)
{
  std::string out = "model,d_HM\n";
  for (const auto& r : board.rows)
    out += csv_field(r.model_id) + "," + format_score(r.dHM) + "\n";
  return out;
}

std::string render_breakdowns_csv(const Leaderboard& board)
{
  std::string out = "model,story_id,dG,dC,dR,d_HM\n";
  for (const auto& b : board.breakdowns)
    out += csv_field(b.model_id) + "," + csv_field(b.story_id) + "," + format_score(b.dG) + "," +
           format_score(b.dC) + "," + format_score(b.dR) + "," + format_score(b.dHM) + "\n";
  return out;
}

} // namespace storyeval
