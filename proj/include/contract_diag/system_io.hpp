#pragma once

#include "contract_diag/diagnostics.hpp"
#include "contract_diag/error.hpp"
#include "contract_diag/theory.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <iomanip>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace contract_diag {

struct ComponentSpec {
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::string> assumptions;
  std::vector<std::string> guarantees;
  bool operator==(const ComponentSpec&) const = default;
};

/// Keep sets per composition step; an absent entry (or an absent list) means
/// the automatic policy of keep_for_step.
using KeepSpec = std::optional<std::vector<std::optional<std::vector<std::string>>>>;

struct SystemSpec {
  std::string theory = "linear";
  std::vector<ComponentSpec> components;
  std::vector<std::string> composition_order;
  KeepSpec keep;
  bool operator==(const SystemSpec&) const = default;

  VarSet declared_variables() const {
    VarSet out;
    for (const auto& c : components) {
      out.insert(c.inputs.begin(), c.inputs.end());
      out.insert(c.outputs.begin(), c.outputs.end());
    }
    return out;
  }
  const ComponentSpec* find(const std::string& name) const {
    for (const auto& c : components)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '@';
}

/// `@k`, `@k-1`, `@k+2` become concrete step suffixes. Arithmetic on a
/// replicated variable needs whitespace: `x@k - 1`.
inline std::string expand_step(const std::string& text, long k) {
  static const std::regex placeholder(R"(@k(?:([+-])([0-9]+))?(?![A-Za-z0-9_']))");
  std::string out;
  auto begin = std::sregex_iterator(text.begin(), text.end(), placeholder);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(text, last, m.position(0) - last);
    long step = k;
    if (m[1].matched) step += (m[1].str() == "+" ? 1 : -1) * std::stol(m[2].str());
    out += "@" + std::to_string(step);
    last = m.position(0) + m.length(0);
  }
  out.append(text, last, std::string::npos);
  return out;
}

inline std::string rename_identifiers(const std::string& text, const std::map<std::string, std::string>& names) {
  if (names.empty()) return text;
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word = text.substr(i, j - i);
      auto it = names.find(word);
      out += it == names.end() ? word : it->second;
      i = j;
    } else {
      out += text[i++];
    }
  }
  return out;
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const std::string& where) {
  if (j.is_null()) return {};
  if (!j.is_array()) throw IoError(where + ": expected a list of strings");
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) throw IoError(where + ": expected a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline std::vector<ComponentSpec> read_component(const nlohmann::json& j) {
  if (!j.is_object()) throw IoError("component entry is not an object");
  if (!j.contains("name") || !j["name"].is_string()) throw IoError("component without a name");
  ComponentSpec base;
  base.name = j["name"].get<std::string>();
  auto where = "component '" + base.name + "'";
  base.inputs = string_list(j.value("inputs", nlohmann::json()), where + " inputs");
  base.outputs = string_list(j.value("outputs", nlohmann::json()), where + " outputs");
  base.assumptions = string_list(j.value("assumptions", nlohmann::json()), where + " assumptions");
  base.guarantees = string_list(j.value("guarantees", nlohmann::json()), where + " guarantees");
  if (!j.contains("replicate")) return {base};

  const auto& r = j["replicate"];
  if (!r.is_object() || !r.contains("count") || !r["count"].is_number_integer() || r["count"].get<long>() < 1)
    throw IoError(where + ": replicate needs a positive integer count");
  long count = r["count"].get<long>();
  long start = r.value("start", 1L);
  std::map<std::string, std::string> wiring;
  if (r.contains("wiring")) {
    if (!r["wiring"].is_object()) throw IoError(where + ": replicate wiring must be an object");
    for (const auto& [from, to] : r["wiring"].items()) {
      if (!to.is_string()) throw IoError(where + ": replicate wiring values must be strings");
      wiring[from] = to.get<std::string>();
    }
  }
  std::vector<ComponentSpec> out;
  for (long k = start; k < start + count; ++k) {
    std::map<std::string, std::string> names;
    for (const auto& [from, to] : wiring) names[from] = expand_step(to, k);
    auto apply = [&](const std::string& s) { return rename_identifiers(expand_step(s, k), names); };
    ComponentSpec c;
    c.name = expand_step(base.name, k);
    if (c.name == base.name) c.name += "@" + std::to_string(k);
    for (const auto& v : base.inputs) c.inputs.push_back(apply(v));
    for (const auto& v : base.outputs) c.outputs.push_back(apply(v));
    for (const auto& t : base.assumptions) c.assumptions.push_back(apply(t));
    for (const auto& t : base.guarantees) c.guarantees.push_back(apply(t));
    out.push_back(std::move(c));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string base_name(const std::string& v) { return v.substr(0, v.find('@')); }

}  // namespace detail

inline void validate(const SystemSpec& spec) {
  if (spec.theory != "linear" && spec.theory != "prop")
    throw IoError("unknown theory '" + spec.theory + "' (expected linear or prop)");
  std::set<std::string> names;
  for (const auto& c : spec.components)
    if (!names.insert(c.name).second) throw IoError("duplicate component '" + c.name + "'");
  std::set<std::string> ordered;
  for (const auto& n : spec.composition_order) {
    if (!names.count(n)) throw IoError("composition_order names unknown component '" + n + "'");
    if (!ordered.insert(n).second) throw IoError("composition_order lists '" + n + "' twice");
  }
  if (ordered.size() != names.size()) throw IoError("composition_order must list every component exactly once");
  if (spec.keep) {
    if (spec.keep->size() + 1 != spec.composition_order.size())
      throw IoError("keep must have one entry per composition step (" +
                    std::to_string(spec.composition_order.size() - 1) + ")");
    auto declared = spec.declared_variables();
    for (const auto& step : *spec.keep)
      if (step)
        for (const auto& v : *step)
          if (!declared.count(v)) throw IoError("keep names undeclared variable '" + v + "'");
  }
}

inline SystemSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IoError("spec must be an object");
  SystemSpec spec;
  spec.theory = j.value("theory", std::string("linear"));
  if (!j.contains("components") || !j["components"].is_array()) throw IoError("spec needs a components list");
  for (const auto& c : j["components"])
    for (auto& expanded : detail::read_component(c)) spec.components.push_back(std::move(expanded));
  if (j.contains("composition_order")) {
    spec.composition_order = detail::string_list(j["composition_order"], "composition_order");
  } else {
    for (const auto& c : spec.components) spec.composition_order.push_back(c.name);
  }
  if (j.contains("keep") && !(j["keep"].is_string() && j["keep"] == "auto")) {
    if (!j["keep"].is_array()) throw IoError("keep must be \"auto\" or a list");
    spec.keep.emplace();
    for (const auto& step : j["keep"]) {
      if (step.is_null() || (step.is_string() && step == "auto")) {
        spec.keep->push_back(std::nullopt);
      } else {
        spec.keep->push_back(detail::string_list(step, "keep"));
      }
    }
  }
  validate(spec);
  return spec;
}

inline nlohmann::ordered_json spec_to_json(const SystemSpec& spec) {
  nlohmann::ordered_json j;
  j["theory"] = spec.theory;
  j["components"] = nlohmann::ordered_json::array();
  for (const auto& c : spec.components) {
    nlohmann::ordered_json cj;
    cj["name"] = c.name;
    cj["inputs"] = c.inputs;
    cj["outputs"] = c.outputs;
    cj["assumptions"] = c.assumptions;
    cj["guarantees"] = c.guarantees;
    j["components"].push_back(cj);
  }
  j["composition_order"] = spec.composition_order;
  if (!spec.keep) {
    j["keep"] = "auto";
  } else {
    j["keep"] = nlohmann::ordered_json::array();
    for (const auto& step : *spec.keep)
      if (step) {
        j["keep"].push_back(*step);
      } else {
        j["keep"].push_back(nullptr);
      }
  }
  return j;
}

inline SystemSpec parse_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("spec is not valid JSON: ") + e.what());
  }
  return spec_from_json(j);
}

/// Expanded form: replicate blocks are already unrolled.
inline std::string render_spec(const SystemSpec& spec) { return spec_to_json(spec).dump(2) + "\n"; }

inline SystemSpec load_spec(const std::string& path) {
  try {
    return parse_spec(detail::read_file(path));
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

/// Builds contracts in composition order. Parse and scope errors surface as
/// ContractError naming the component.
template <typename Theory>
CompositionOrder<Theory> to_order(const SystemSpec& spec) {
  if (spec.theory != Theory::name)
    throw IoError("spec theory is '" + spec.theory + "', expected '" + std::string(Theory::name) + "'");
  CompositionOrder<Theory> order;
  for (const auto& name : spec.composition_order) {
    const auto* c = spec.find(name);
    VarSet in(c->inputs.begin(), c->inputs.end()), out(c->outputs.begin(), c->outputs.end());
    try {
      order.contracts.push_back(make_contract<Theory>(c->name, in, out, c->assumptions, c->guarantees));
    } catch (const ParseError& e) {
      throw ContractError("component '" + name + "': " + e.what());
    } catch (const ContractError& e) {
      throw ContractError("component '" + name + "': " + e.what());
    }
  }
  if (spec.keep)
    for (const auto& step : *spec.keep)
      order.keep.push_back(step ? std::optional<VarSet>(VarSet(step->begin(), step->end())) : std::nullopt);
  return order;
}

/// Parses `M1.g0` or `comp_3.a12`.
inline TermId parse_term_id(std::string_view text) {
  auto dot = text.rfind('.');
  if (dot == std::string_view::npos || dot + 2 > text.size() || dot == 0)
    throw IoError("malformed term id '" + std::string(text) + "'");
  char s = text[dot + 1];
  if (s != 'a' && s != 'g') throw IoError("malformed term id '" + std::string(text) + "'");
  auto digits = text.substr(dot + 2);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw IoError("malformed term id '" + std::string(text) + "'");
  return {std::string(text.substr(0, dot)), s == 'a' ? Section::assumption : Section::guarantee,
          static_cast<std::size_t>(std::stoul(std::string(digits)))};
}

struct LogOptions {
  /// Every declared variable must have a value.
  bool require_total = true;
};

namespace detail {

/// Cells of a log before typing: variable name and raw text.
using RawLog = std::vector<std::pair<std::string, std::string>>;

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(trim(cell));
  return out;
}

/// One data row: flat names. More rows, or a `step` column: `name@row`.
inline RawLog read_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(split_csv_line(t));
  }
  RawLog out;
  if (rows.empty()) return out;
  const auto& header = rows.front();
  std::set<std::string> seen;
  std::optional<std::size_t> step_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].empty()) throw IoError("empty column name in log header");
    if (!seen.insert(header[c]).second) throw IoError("duplicate column '" + header[c] + "'");
    if (header[c] == "step") step_col = c;
  }
  bool suffix = step_col || rows.size() > 2;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size())
      throw IoError("log row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) + " cells, header has " +
                    std::to_string(header.size()));
    std::string tag = step_col ? rows[r][*step_col] : std::to_string(r - 1);
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (step_col && c == *step_col) continue;
      out.emplace_back(suffix ? header[c] + "@" + tag : header[c], rows[r][c]);
    }
  }
  return out;
}

inline std::string json_cell(const nlohmann::json& v, const std::string& name) {
  if (v.is_null()) return "--";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  // Shortest round-trip text, so 0.1 reads as 1/10.
  if (v.is_number()) return v.dump();
  if (v.is_string()) return v.get<std::string>();
  throw IoError("value of '" + name + "' is neither a number, a Boolean nor a string");
}

inline RawLog read_json_log(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("log is not valid JSON: ") + e.what());
  }
  RawLog out;
  auto flat = [&](const nlohmann::json& obj, const std::string& suffix) {
    if (!obj.is_object()) throw IoError("log rows must be objects");
    for (const auto& [k, v] : obj.items()) out.emplace_back(k + suffix, json_cell(v, k));
  };
  if (j.is_object()) {
    flat(j, "");
  } else if (j.is_array()) {
    for (std::size_t r = 0; r < j.size(); ++r) flat(j[r], "@" + std::to_string(r));
  } else {
    throw IoError("log must be an object or a list of objects");
  }
  return out;
}

}  // namespace detail

/// Types and checks raw cells against the spec. `--` and empty cells are absent.
template <typename Theory>
Valuation<typename Theory::value_type> typed_log(const detail::RawLog& raw, const SystemSpec& spec,
                                                 const LogOptions& opts = {}) {
  auto declared = spec.declared_variables();
  std::set<std::string> bases;
  for (const auto& v : declared) bases.insert(detail::base_name(v));
  Valuation<typename Theory::value_type> out;
  for (const auto& [name, text] : raw) {
    if (!declared.count(name) && !bases.count(detail::base_name(name)))
      throw IoError("unknown variable '" + name + "'");
    if (text.empty() || text == "--") continue;
    auto v = Theory::parse_value(text);
    if (!v)
      throw IoError("type mismatch: '" + text + "' for variable '" + name + "' is not a " +
                    (Theory::name == "linear" ? "rational" : "Boolean") + " value in " + std::string(Theory::name) +
                    " theory");
    if (!out.emplace(name, *v).second) throw IoError("duplicate value for '" + name + "'");
  }
  if (opts.require_total) {
    if (out.empty()) throw IoError("non-total valuation: log is empty");
    std::vector<std::string> missing;
    for (const auto& v : declared)
      if (!out.count(v)) missing.push_back(v);
    if (!missing.empty())
      throw IoError("non-total valuation: missing '" + missing.front() + "'" +
                    (missing.size() > 1 ? " and " + std::to_string(missing.size() - 1) + " more" : ""));
  }
  return out;
}

template <typename Theory>
Valuation<typename Theory::value_type> parse_log(std::string_view text, const SystemSpec& spec,
                                                 const LogOptions& opts = {}) {
  auto first = text.find_first_not_of(" \t\r\n");
  bool json = first != std::string_view::npos && (text[first] == '{' || text[first] == '[');
  return typed_log<Theory>(json ? detail::read_json_log(text) : detail::read_csv(text), spec, opts);
}

template <typename Theory>
Valuation<typename Theory::value_type> load_log(const std::string& path, const SystemSpec& spec,
                                                const LogOptions& opts = {}) {
  try {
    return parse_log<Theory>(detail::read_file(path), spec, opts);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string export_dot(const ProvenanceGraph& g, const std::string& name = "diagnostics") {
  std::ostringstream out;
  out << "digraph " << name << " {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& [id, label] : g.vertices())
    out << "  \"" << detail::dot_escape(id.str()) << "\" [label=\"" << detail::dot_escape(id.str() + ": " + label)
        << "\\n(" << detail::dot_escape(id.owner) << ")\"];\n";
  for (const auto& [u, w] : g.edges())
    out << "  \"" << detail::dot_escape(u.str()) << "\" -> \"" << detail::dot_escape(w.str()) << "\";\n";
  out << "}\n";
  return out.str();
}

enum class ReportFormat { text, json };

namespace detail {

inline nlohmann::ordered_json trace_json(const TraceStep& step) {
  nlohmann::ordered_json j;
  j["target"] = step.target.str();
  j["leaves"] = nlohmann::ordered_json::array();
  for (const auto& l : step.leaves) {
    nlohmann::ordered_json lj;
    lj["term"] = l.leaf.str();
    lj["component"] = l.component;
    lj["action"] = l.action;
    lj["satisfied"] = l.satisfied;
    lj["faulty"] = l.faulty;
    lj["violated_assumptions"] = nlohmann::ordered_json::array();
    for (const auto& a : l.assumptions) {
      nlohmann::ordered_json aj;
      aj["term"] = a.id.str();
      aj["causes"] = nlohmann::ordered_json::array();
      for (const auto& c : a.causes) aj["causes"].push_back(c.str());
      aj["low_confidence"] = a.low_confidence;
      aj["searched_later_contracts"] = a.used_suffix;
      aj["traces"] = nlohmann::ordered_json::array();
      for (const auto& t : a.traces) aj["traces"].push_back(trace_json(t));
      lj["violated_assumptions"].push_back(aj);
    }
    j["leaves"].push_back(lj);
  }
  return j;
}

inline void trace_text(std::ostream& out, const TraceStep& step, int depth) {
  std::string pad(2 * depth, ' ');
  out << pad << "trace " << step.target.str() << "\n";
  for (const auto& l : step.leaves) {
    out << pad << "  " << l.leaf.str() << " [" << l.component << "] ";
    if (l.action == "skipped") {
      out << "skipped (assumption)\n";
      continue;
    }
    out << (l.satisfied ? "holds" : "violated");
    if (l.action == "repeat") out << " (seen)";
    if (l.faulty) out << " -> faulty";
    out << "\n";
    for (const auto& a : l.assumptions) {
      out << pad << "    assumption " << a.id.str() << " violated";
      if (!a.causes.empty()) {
        out << "; caused by";
        for (const auto& c : a.causes) out << " " << c.str();
      }
      if (a.low_confidence) out << " (low confidence)";
      out << "\n";
      for (const auto& t : a.traces) trace_text(out, t, depth + 3);
    }
  }
}

inline std::string percent(std::size_t a, std::size_t b) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(1) << (b == 0 ? 0.0 : 100.0 * static_cast<double>(a) / static_cast<double>(b));
  return ss.str();
}

}  // namespace detail

inline std::string report_to_json(const DiagnosisReport& r) {
  nlohmann::ordered_json j;
  j["violated_guarantees"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.violated_guarantees.size(); ++i)
    j["violated_guarantees"].push_back(
        {{"term", r.violated_guarantees[i].str()}, {"text", i < r.violated_texts.size() ? r.violated_texts[i] : ""}});
  j["faulty_components"] = r.faulty_components;
  j["terms_checked"] = r.terms_checked;
  j["terms_total"] = r.terms_total;
  j["ratio"] = r.terms_total == 0 ? 0.0 : static_cast<double>(r.terms_checked) / static_cast<double>(r.terms_total);
  j["low_confidence"] = r.low_confidence;
  j["evaluations"] = nlohmann::ordered_json::array();
  for (const auto& e : r.evaluations)
    j["evaluations"].push_back({{"term", e.id.str()}, {"text", e.text}, {"satisfied", e.satisfied}});
  j["warnings"] = r.warnings;
  j["trace"] = nlohmann::ordered_json::array();
  for (const auto& t : r.trace) j["trace"].push_back(detail::trace_json(t));
  return j.dump(2) + "\n";
}

/// `color` adds ANSI styling to verdicts in the text form.
inline std::string render_report(const DiagnosisReport& r, ReportFormat format, bool color = false) {
  if (format == ReportFormat::json) return report_to_json(r);
  auto paint = [&](const std::string& s, const char* code) {
    return color ? std::string("\x1b[") + code + "m" + s + "\x1b[0m" : s;
  };
  std::ostringstream out;
  if (r.violated_guarantees.empty()) {
    out << "no violated system guarantee\n";
    return out.str();
  }
  out << "violated system guarantees:\n";
  for (std::size_t i = 0; i < r.violated_guarantees.size(); ++i)
    out << "  " << r.violated_guarantees[i].str() << "  "
        << (i < r.violated_texts.size() ? r.violated_texts[i] : "") << "\n";
  out << "faulty components:";
  if (r.faulty_components.empty()) out << " none";
  for (const auto& c : r.faulty_components) out << " " << paint(c, "1;31");
  out << "\n";
  out << "evaluations:\n";
  std::size_t n = 0;
  for (const auto& e : r.evaluations)
    out << "  " << std::setw(3) << ++n << ". " << e.id.str() << "  " << e.text << "  "
        << (e.satisfied ? paint("holds", "32") : paint("violated", "31")) << "\n";
  out << r.terms_checked << "/" << r.terms_total << " terms checked (" << detail::percent(r.terms_checked, r.terms_total)
      << "%)\n";
  for (const auto& t : r.trace) detail::trace_text(out, t, 0);
  for (const auto& w : r.warnings) out << "warning: " << w << "\n";
  if (r.low_confidence) out << "warning: result is low confidence\n";
  return out.str();
}

/// Human-readable contract listing used by the compose command.
template <typename Theory>
std::string describe(const Contract<Theory>& c) {
  std::ostringstream out;
  auto list = [&](const VarSet& vs) {
    std::string s;
    for (const auto& v : vs) s += (s.empty() ? "" : ", ") + v;
    return "{" + s + "}";
  };
  out << "contract " << c.name() << "\n";
  out << "  inputs:  " << list(c.inputs()) << "\n";
  out << "  outputs: " << list(c.outputs()) << "\n";
  out << "  assumptions (" << c.assumptions().size() << "):\n";
  for (const auto& e : c.assumptions()) out << "    " << e.id.str() << "  " << Theory::render(e.term) << "\n";
  out << "  guarantees (" << c.guarantees().size() << "):\n";
  for (const auto& e : c.guarantees()) out << "    " << e.id.str() << "  " << Theory::render(e.term) << "\n";
  return out.str();
}

}  // namespace contract_diag
