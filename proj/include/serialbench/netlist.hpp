#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "serialbench/circuit.hpp"

namespace serialbench {

// Text netlist, one gate per line:
//
//   input <id>
//   const <id> <0|1>
//   and|or|not|maj <id> <input-id>...
//   output <id>          (must be the last non-comment line)
//
// Lines starting with '#' and blank lines are ignored. Gates may appear in any
// order but their ids must end up dense. Errors carry the 1-based line number.
Circuit parse_netlist(std::string_view text);
Circuit read_netlist_file(const std::string& path);

// Canonical form: gates in id order, single spaces, '\n' line endings, no
// comments. parse_netlist(write_netlist(c)) == c.
std::string write_netlist(const Circuit& c);

}  // namespace serialbench
