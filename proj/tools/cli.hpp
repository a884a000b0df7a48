#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "peakmdp/exact_solver.hpp"

namespace peakmdp::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kSolverError = 2, kVerifyFailed = 3 };

/// Lets tests swap the exact solver used by `verify`, e.g. for a broken build.
struct Hooks {
  std::function<ExactResult(const Scenario&)> exact = [](const Scenario& s) {
    return exact_solve(s);
  };
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const Hooks& hooks = {});

}  // namespace peakmdp::cli
