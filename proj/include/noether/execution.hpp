#pragma once

namespace noether {

/// Serial is the reference path; Parallel runs the same kernel under OpenMP
/// and must produce bit-identical results.
enum class Execution { Serial, Parallel };

}  // namespace noether
