#pragma once

#include <iosfwd>

namespace storyweaver {

// Exit codes: 0 ok, 1 violations found, 2 usage or input error,
// 3 environment, network or provider error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace storyweaver
