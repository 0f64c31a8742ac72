#pragma once

// Random inputs for property tests. All generators are deterministic for a
// given engine state.

#include <random>
#include <string>
#include <vector>

#include "evtrace/minic/ast.hpp"
#include "evtrace/trace.hpp"

namespace evtest {

using Rng = std::mt19937_64;

/// A terminating MiniC program with at most `max_nodes` statement and
/// expression nodes. Loops are counter-bounded and functions only call
/// functions defined before them.
std::string random_program(Rng& rng, int max_nodes = 60);

/// Statement and expression nodes, counting function bodies and global
/// declarations.
std::size_t count_nodes(const evtrace::minic::Program& p);

/// A well-formed trace of at most `max_events` events over a small
/// vocabulary: names a, b, c; functions main, f; probes p (int), q (bool)
/// and s (str) recorded on every event.
evtrace::Trace random_trace(Rng& rng, std::size_t max_events = 200);

/// A rule over the vocabulary of random_trace, without division and with
/// probe references that always resolve.
std::string random_rule(Rng& rng);

/// A path expression over leaves func_call IS 'a', func_call IS 'b',
/// ex_stmt and func_call.
std::string random_path(Rng& rng, int depth = 3);

}  // namespace evtest
