#pragma once

namespace fockcat {

// Every data-parallel loop in the library takes one of these. `serial` is the
// reference path the tests compare against; `parallel` runs the same loop body
// under OpenMP and merges results in index order, so both produce identical
// output.
enum class Exec { serial, parallel };

inline bool use_threads(Exec exec) { return exec == Exec::parallel; }

}  // namespace fockcat
