// Copyright 2026 The storyeval Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace storyeval::cli {

enum ExitCode : int
{
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kPartialFailure = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace storyeval::cli
