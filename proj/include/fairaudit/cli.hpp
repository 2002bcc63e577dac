#pragma once

namespace fairaudit {

// Entry point behind the fairaudit binary. Exit codes:
//   0  success / all enabled measures pass
//   2  at least one measure failed
//   3  no failure but at least one measure undefined
//   1  data or configuration error (error name on stderr)
//   64 usage error
int run_cli(int argc, const char* const* argv);

}  // namespace fairaudit
