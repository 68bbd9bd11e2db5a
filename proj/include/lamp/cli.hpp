#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lamp::cli {

// The lamp command line: policy add|rm|list, enroll, check, taxonomy load,
// bench, serve. Returns 0 on success, 1 on validation errors, 2 on I/O
// errors. Exposed as a function so tests can drive it in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lamp::cli
