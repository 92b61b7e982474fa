#include "serialbench/netlist.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace serialbench {

namespace {

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) words.push_back(line.substr(start, i - start));
  }
  return words;
}

GateId parse_id(std::string_view w, std::size_t line) {
  GateId v = 0;
  auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
  if (ec != std::errc() || ptr != w.data() + w.size()) {
    throw ParseError(line, "expected a gate id, got '" + std::string(w) + "'");
  }
  return v;
}

std::optional<GateKind> logic_kind(std::string_view w) {
  if (w == "and") return GateKind::And;
  if (w == "or") return GateKind::Or;
  if (w == "not") return GateKind::Not;
  if (w == "maj") return GateKind::Majority;
  return std::nullopt;
}

}  // namespace

Circuit parse_netlist(std::string_view text) {
  std::map<GateId, Gate> by_id;
  std::map<GateId, std::size_t> defined_at;
  std::optional<GateId> output;
  std::size_t output_line = 0;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto words = split_words(line);
    if (words.empty() || words[0].front() == '#') continue;
    if (output) throw ParseError(line_no, "content after the output line");

    const std::string_view head = words[0];
    if (head == "output") {
      if (words.size() != 2) throw ParseError(line_no, "expected 'output <id>'");
      output = parse_id(words[1], line_no);
      output_line = line_no;
      continue;
    }

    Gate g;
    if (head == "input") {
      if (words.size() != 2) throw ParseError(line_no, "expected 'input <id>'");
      g.kind = GateKind::Input;
    } else if (head == "const") {
      if (words.size() != 3 || (words[2] != "0" && words[2] != "1")) {
        throw ParseError(line_no, "expected 'const <id> <0|1>'");
      }
      g.kind = words[2] == "1" ? GateKind::Const1 : GateKind::Const0;
    } else if (auto k = logic_kind(head)) {
      if (words.size() < 3) throw ParseError(line_no, "gate needs at least one input");
      g.kind = *k;
      if (g.kind == GateKind::Not && words.size() != 3) {
        throw ParseError(line_no, "not takes exactly one input");
      }
      for (std::size_t i = 2; i < words.size(); ++i) g.inputs.push_back(parse_id(words[i], line_no));
    } else {
      throw ParseError(line_no, "unknown gate kind '" + std::string(head) + "'");
    }
    g.id = parse_id(words[1], line_no);
    if (auto it = defined_at.find(g.id); it != defined_at.end()) {
      throw ParseError(line_no, "gate " + std::to_string(g.id) + " already defined on line " +
                                    std::to_string(it->second));
    }
    defined_at[g.id] = line_no;
    by_id[g.id] = std::move(g);
  }

  if (!output) throw ParseError(line_no, "missing 'output <id>' line");

  std::vector<Gate> gates;
  gates.reserve(by_id.size());
  for (auto& [id, g] : by_id) {
    if (id != gates.size()) {
      throw ParseError(defined_at[id], "gate ids must be dense; id " +
                                           std::to_string(gates.size()) + " is missing");
    }
    gates.push_back(std::move(g));
  }
  try {
    return Circuit(std::move(gates), *output);
  } catch (const CycleError& e) {
    throw ParseError(defined_at.count(e.edge().from) ? defined_at[e.edge().from] : output_line,
                     e.what());
  } catch (const StructuralError& e) {
    throw ParseError(output_line, e.what());
  }
}

Circuit read_netlist_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open netlist '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

std::string write_netlist(const Circuit& c) {
  std::string out;
  for (const Gate& g : c.gates()) {
    switch (g.kind) {
      case GateKind::Input: out += "input " + std::to_string(g.id); break;
      case GateKind::Const0: out += "const " + std::to_string(g.id) + " 0"; break;
      case GateKind::Const1: out += "const " + std::to_string(g.id) + " 1"; break;
      default:
        out += kind_name(g.kind);
        out += ' ';
        out += std::to_string(g.id);
        for (GateId in : g.inputs) {
          out += ' ';
          out += std::to_string(in);
        }
        break;
    }
    out += '\n';
  }
  out += "output " + std::to_string(c.output()) + "\n";
  return out;
}

}  // namespace serialbench
