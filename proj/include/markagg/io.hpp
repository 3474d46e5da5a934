#pragma once

#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "markagg/ctmc.hpp"
#include "markagg/error.hpp"
#include "markagg/markov_core.hpp"
#include "markagg/matrix.hpp"
#include "markagg/partitions.hpp"

// Text formats. Lines whose first character is '#' are comments; blank
// lines are ignored. Files carry 17 significant digits, console reports 12.

namespace markagg::io {

namespace detail {

inline std::vector<std::string> data_lines(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(line);
  }
  return out;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline double parse_double(const std::string& tok) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw Error(Errc::kParse, "not a decimal number: '" + tok + "'");
  return v;
}

inline long long parse_int(const std::string& tok) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size())
    throw Error(Errc::kParse, "not an integer: '" + tok + "'");
  return v;
}

}  // namespace detail

inline std::string format_number(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline std::string format_vector(std::span<const double> v, int digits = 12) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_number(v[i], digits);
  }
  return out;
}

/// Matrix file: n on the first data line, then n rows of n numbers.
inline Matrix read_matrix(std::istream& in) {
  const auto lines = detail::data_lines(in);
  if (lines.empty()) throw Error(Errc::kParse, "matrix file has no data");
  const auto head = detail::split_ws(lines[0]);
  if (head.size() != 1) throw Error(Errc::kParse, "first data line must hold only n");
  const long long n = detail::parse_int(head[0]);
  if (n < 1) throw Error(Errc::kParse, "n must be positive");
  const auto size = static_cast<std::size_t>(n);
  if (lines.size() != size + 1)
    throw Error(Errc::kParse, "expected " + std::to_string(n) + " matrix rows, found " +
                                  std::to_string(lines.size() - 1));
  Matrix m(size, size);
  for (std::size_t i = 0; i < size; ++i) {
    const auto toks = detail::split_ws(lines[i + 1]);
    if (toks.size() != size)
      throw Error(Errc::kParse, "row " + std::to_string(i + 1) + " has " +
                                    std::to_string(toks.size()) + " entries, expected " +
                                    std::to_string(n));
    for (std::size_t j = 0; j < size; ++j) m(i, j) = detail::parse_double(toks[j]);
  }
  return m;
}

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      out << format_number(m(i, j), 17);
    }
    out << '\n';
  }
}

/// Partition file: one data line of labels, canonicalised on read.
inline Partition read_partition(std::istream& in) {
  const auto lines = detail::data_lines(in);
  if (lines.size() != 1) throw Error(Errc::kParse, "partition file must hold exactly one data line");
  std::vector<int> raw;
  for (const auto& tok : detail::split_ws(lines[0])) raw.push_back(static_cast<int>(detail::parse_int(tok)));
  return canonicalize(raw);
}

inline void write_partition(std::ostream& out, const Partition& g) {
  const auto labels = g.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out << ' ';
    out << labels[i];
  }
  out << '\n';
}

/// Fixed-class file: 1-based state indices, whitespace separated.
inline FixedClass read_fixed(std::istream& in) {
  FixedClass f;
  for (const auto& line : detail::data_lines(in))
    for (const auto& tok : detail::split_ws(line)) {
      const long long v = detail::parse_int(tok);
      if (v < 1) throw Error(Errc::kInvalidFixedSet, "state indices are 1-based");
      f.states.push_back(static_cast<std::size_t>(v - 1));
    }
  if (f.states.empty()) throw Error(Errc::kInvalidFixedSet, "fixed class file lists no states");
  return f;
}

inline void write_fixed(std::ostream& out, const FixedClass& f) {
  for (std::size_t i = 0; i < f.states.size(); ++i) {
    if (i) out << ' ';
    out << f.states[i] + 1;
  }
  out << '\n';
}

/// Distribution file: one data line of n probabilities.
inline Distribution read_distribution(std::istream& in) {
  const auto lines = detail::data_lines(in);
  if (lines.size() != 1) throw Error(Errc::kParse, "distribution file must hold exactly one data line");
  std::vector<double> p;
  for (const auto& tok : detail::split_ws(lines[0])) p.push_back(detail::parse_double(tok));
  return Distribution(std::move(p));
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// "a*Name + Name + ..." or "0"
inline CountVector parse_side(const std::string& side, const std::vector<std::string>& species,
                              std::size_t line_no) {
  CountVector counts(species.size(), 0);
  const std::string s = trim(side);
  if (s == "0") return counts;
  std::size_t start = 0;
  while (true) {
    const auto plus = s.find('+', start);
    const std::string term = trim(s.substr(start, plus == std::string::npos ? std::string::npos : plus - start));
    if (term.empty())
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": empty reaction term");
    long long coeff = 1;
    std::string name = term;
    if (const auto star = term.find('*'); star != std::string::npos) {
      coeff = parse_int(trim(term.substr(0, star)));
      name = trim(term.substr(star + 1));
      if (coeff < 0) throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": negative coefficient");
    }
    const auto it = std::find(species.begin(), species.end(), name);
    if (it == species.end())
      throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": unknown species '" + name + "'");
    counts[static_cast<std::size_t>(it - species.begin())] += coeff;
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  return counts;
}

}  // namespace detail

/// Reaction-network file with SPECIES, INIT and REACTIONS sections.
inline ReactionNetwork read_reaction_network(std::istream& in) {
  enum class Section { kNone, kSpecies, kInit, kReactions } section = Section::kNone;
  std::vector<std::string> species;
  std::vector<std::pair<std::string, long long>> init;
  std::vector<std::pair<std::string, std::size_t>> reaction_lines;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '#') continue;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t == "SPECIES") { section = Section::kSpecies; continue; }
    if (t == "INIT") { section = Section::kInit; continue; }
    if (t == "REACTIONS") { section = Section::kReactions; continue; }
    switch (section) {
      case Section::kNone:
        throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": data before any section header");
      case Section::kSpecies:
        for (auto& s : detail::split_ws(t)) species.push_back(s);
        break;
      case Section::kInit: {
        const auto eq = t.find('=');
        if (eq == std::string::npos)
          throw Error(Errc::kParse, "line " + std::to_string(line_no) + ": expected 'name = integer'");
        init.emplace_back(detail::trim(t.substr(0, eq)), detail::parse_int(detail::trim(t.substr(eq + 1))));
        break;
      }
      case Section::kReactions:
        reaction_lines.emplace_back(t, line_no);
        break;
    }
  }
  if (species.empty()) throw Error(Errc::kParse, "SPECIES section is missing or empty");

  CountVector initial(species.size(), 0);
  for (const auto& [name, value] : init) {
    const auto it = std::find(species.begin(), species.end(), name);
    if (it == species.end()) throw Error(Errc::kParse, "INIT names unknown species '" + name + "'");
    initial[static_cast<std::size_t>(it - species.begin())] = value;
  }

  std::vector<Reaction> reactions;
  for (const auto& [text, no] : reaction_lines) {
    const auto arrow = text.find("->");
    const auto at = text.find('@');
    if (arrow == std::string::npos || at == std::string::npos || at < arrow)
      throw Error(Errc::kParse, "line " + std::to_string(no) + ": expected 'lhs -> rhs @ rate'");
    Reaction r;
    r.consumed = detail::parse_side(text.substr(0, arrow), species, no);
    r.produced = detail::parse_side(text.substr(arrow + 2, at - arrow - 2), species, no);
    r.rate = detail::parse_double(detail::trim(text.substr(at + 1)));
    reactions.push_back(std::move(r));
  }
  return ReactionNetwork(std::move(species), std::move(reactions), std::move(initial));
}

/// Legend: `index<TAB>name=count,...`, 1-based indices.
inline void write_legend(std::ostream& out, const ReactionNetwork& net,
                         const std::vector<CountVector>& states) {
  for (std::size_t s = 0; s < states.size(); ++s) {
    out << s + 1 << '\t';
    for (std::size_t i = 0; i < net.species().size(); ++i) {
      if (i) out << ',';
      out << net.species()[i] << '=' << states[s][i];
    }
    out << '\n';
  }
}

template <typename Reader>
auto read_file(const std::string& path, Reader reader) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kParse, "cannot open '" + path + "'");
  return reader(in);
}

}  // namespace markagg::io
