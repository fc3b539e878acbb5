#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "subspec/error.hpp"
#include "subspec/group_model.hpp"

namespace subspec {

/// H^n with basis X_1..X_n, Y_1..Y_n, T and [X_j, Y_j] = T.
inline GroupModel heisenberg(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "heisenberg:<n> requires n >= 1");
  std::size_t dim = 2 * n + 1;
  StructureConstants sc(dim);
  std::vector<std::size_t> horizontal;
  GroupOptions opt;
  opt.norm = NormKind::Kaplan;
  opt.name = "heisenberg:" + std::to_string(n);
  for (std::size_t j = 0; j < n; ++j) sc.set_bracket(j, n + j, 2 * n, Rational(1));
  for (std::size_t j = 0; j < 2 * n; ++j) horizontal.push_back(j);
  if (n == 1) {
    opt.variables = {"x", "y", "t"};
  } else {
    for (std::size_t j = 0; j < n; ++j) opt.variables.push_back("x" + std::to_string(j + 1));
    for (std::size_t j = 0; j < n; ++j) opt.variables.push_back("y" + std::to_string(j + 1));
    opt.variables.push_back("t");
  }
  return build_group(sc, horizontal, opt);
}

/// Abelian R^d; balls are max-norm cubes.
inline GroupModel euclidean(std::size_t d) {
  if (d == 0) throw Error(ErrorKind::InvalidArgument, "euclidean:<d> requires d >= 1");
  StructureConstants sc(d);
  std::vector<std::size_t> horizontal;
  GroupOptions opt;
  opt.name = "euclidean:" + std::to_string(d);
  for (std::size_t j = 0; j < d; ++j) horizontal.push_back(j);
  if (d == 1) opt.variables = {"x"};
  return build_group(sc, horizontal, opt);
}

/// Engel algebra: [E_1, E_2] = E_3, [E_1, E_3] = E_4, horizontal {E_1, E_2}; step 3, Q = 7.
inline GroupModel engel() {
  StructureConstants sc(4);
  sc.set_bracket(0, 1, 2, Rational(1));
  sc.set_bracket(0, 2, 3, Rational(1));
  GroupOptions opt;
  opt.name = "engel";
  return build_group(sc, {0, 1}, opt);
}

/// Definition file: {"dim", "step_hint"?, "brackets": [[i, j, k, "c"], ...], "horizontal": [...],
/// "variables"?, "norm"?: "gauge"|"kaplan"}; indices are 1-based.
inline GroupModel parse_group_json(const nlohmann::json& j) {
  try {
    std::size_t dim = j.at("dim").get<std::size_t>();
    StructureConstants sc(dim);
    std::vector<std::vector<bool>> seen(dim * dim, std::vector<bool>(dim, false));
    for (const auto& b : j.at("brackets")) {
      if (!b.is_array() || b.size() != 4) throw Error(ErrorKind::InvalidStructure, "bracket entries are [i, j, k, c]");
      auto i = b[0].get<std::size_t>(), jj = b[1].get<std::size_t>(), k = b[2].get<std::size_t>();
      if (i < 1 || jj < 1 || k < 1 || i > dim || jj > dim || k > dim)
        throw Error(ErrorKind::InvalidStructure, "bracket index out of range (indices are 1-based)");
      Rational c = b[3].is_string() ? parse_rational(b[3].get<std::string>()) : parse_rational(b[3].dump());
      std::size_t a = i - 1, bb = jj - 1, kk = k - 1;
      if (seen[a * dim + bb][kk] || seen[bb * dim + a][kk]) {
        if (sc(a, bb, kk) != c)
          throw Error(ErrorKind::InvalidStructure, "conflicting entries for [E_" + std::to_string(i) + ", E_" +
                                                       std::to_string(jj) + "] component " + std::to_string(k));
        continue;
      }
      sc.set_bracket(a, bb, kk, c);
      seen[a * dim + bb][kk] = seen[bb * dim + a][kk] = true;
    }
    std::vector<std::size_t> horizontal;
    for (auto h : j.at("horizontal")) {
      auto idx = h.get<std::size_t>();
      if (idx < 1 || idx > dim) throw Error(ErrorKind::InvalidArgument, "horizontal index out of range (1-based)");
      horizontal.push_back(idx - 1);
    }
    GroupOptions opt;
    opt.name = j.value("name", std::string("custom"));
    if (j.contains("variables")) opt.variables = j["variables"].get<std::vector<std::string>>();
    std::string norm = j.value("norm", std::string("gauge"));
    if (norm == "kaplan") opt.norm = NormKind::Kaplan;
    else if (norm != "gauge") throw Error(ErrorKind::InvalidArgument, "norm must be 'gauge' or 'kaplan'");
    GroupModel g = build_group(sc, horizontal, opt);
    if (j.contains("step_hint") && j["step_hint"].get<std::size_t>() != g.step())
      throw Error(ErrorKind::NotNilpotent, "step_hint " + j["step_hint"].dump() + " disagrees with computed step " +
                                               std::to_string(g.step()));
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("group definition: ") + e.what());
  }
}

/// Canonical text identifying a group: the preset name, or the file contents.
inline std::string group_definition_text(std::string_view spec) {
  if (spec.starts_with("heisenberg:") || spec.starts_with("euclidean:") || spec == "engel") return std::string(spec);
  std::ifstream in{std::string(spec)};
  if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open group definition '" + std::string(spec) + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Preset `heisenberg:<n>`, `euclidean:<d>`, `engel`, or a path to a JSON definition.
inline GroupModel load_group(std::string_view spec) {
  auto parse_count = [&](std::string_view rest) {
    std::size_t value = 0;
    try {
      std::size_t used = 0;
      value = std::stoul(std::string(rest), &used);
      if (used != rest.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "bad group preset '" + std::string(spec) + "'");
    }
    return value;
  };
  if (spec.starts_with("heisenberg:")) return heisenberg(parse_count(spec.substr(11)));
  if (spec.starts_with("euclidean:")) return euclidean(parse_count(spec.substr(10)));
  if (spec == "engel") return engel();
  std::string text = group_definition_text(spec);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("group definition JSON: ") + e.what());
  }
  return parse_group_json(j);
}

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string content_hash(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace subspec
