#pragma once

#include <string>
#include <vector>

namespace qd {

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

/// Runs argv[0] (PATH lookup) with the given arguments, no shell involved.
/// An empty `cwd` keeps the current directory.
ProcessResult run_process(const std::vector<std::string>& argv, const std::string& cwd = {});

}  // namespace qd
