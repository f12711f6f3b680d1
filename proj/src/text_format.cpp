#include "pgc/text_format.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "pgc/errors.hpp"

namespace pgc {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split on whitespace; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      tokens.clear();
      std::istringstream ss(line);
      for (std::string t; ss >> t;) tokens.push_back(t);
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

struct Header {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t line = 0;
};

Header read_header(LineReader& r, const std::string& tag) {
  std::vector<std::string> t;
  if (!r.next(t)) throw ParseError("empty input, expected '" + tag + "' header", r.line());
  if (t.size() != 3 || t[0] != tag) {
    throw ParseError("expected '" + tag + " <a> <b>' header", r.line());
  }
  return {parse_index(t[1], r.line()), parse_index(t[2], r.line()), r.line()};
}

void expect_end(LineReader& r) {
  std::vector<std::string> t;
  if (r.next(t)) throw ParseError("unexpected content after the last node", r.line());
}

// Shared by pgc and pmc: sum and product lines.
template <typename NodeT>
bool parse_internal(const std::vector<std::string>& t, std::size_t line,
                    std::vector<NodeT>& nodes) {
  if (t[0] == "s") {
    SumNode s;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const auto colon = t[i].find(':');
      if (colon == std::string::npos) {
        throw ParseError("sum edge '" + t[i] + "' must be child:weight", line);
      }
      s.children.push_back({parse_index(t[i].substr(0, colon), line),
                            parse_real(t[i].substr(colon + 1), line)});
    }
    nodes.emplace_back(std::move(s));
    return true;
  }
  if (t[0] == "p") {
    ProductNode p;
    for (std::size_t i = 1; i < t.size(); ++i) p.children.push_back(parse_index(t[i], line));
    nodes.emplace_back(std::move(p));
    return true;
  }
  return false;
}

std::size_t parse_var(const std::vector<std::string>& t, std::size_t line,
                      std::size_t num_vars) {
  if (t.size() != 2) throw ParseError("leaf line takes one variable", line);
  const std::size_t v = parse_index(t[1], line);
  if (v < 1 || v > num_vars) {
    throw ParseError("variable " + t[1] + " outside 1.." + std::to_string(num_vars), line);
  }
  return v - 1;
}

void write_internal(std::ostream& out, const SumNode& s) {
  out << 's';
  for (const auto& e : s.children) out << ' ' << e.child << ':' << format_real(e.weight);
  out << '\n';
}

void write_internal(std::ostream& out, const ProductNode& p) {
  out << 'p';
  for (auto c : p.children) out << ' ' << c;
  out << '\n';
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RefusalError("cannot open " + path.string());
  return in;
}

template <typename Fn>
auto load_with_path(const std::filesystem::path& path, Fn&& fn) {
  auto in = open_or_throw(path);
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

}  // namespace

double parse_real(const std::string& token, std::size_t line) {
  double v = 0.0;
  const char* b = token.data();
  const char* e = b + token.size();
  if (b != e && *b == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || b == e) {
    throw ParseError("bad number '" + token + "'", line);
  }
  return v;
}

std::size_t parse_index(const std::string& token, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw ParseError("bad index '" + token + "'", line);
  }
  return v;
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::shared_ptr<const NodeCircuit> read_pgc(std::istream& in) {
  LineReader r(in);
  const Header h = read_header(r, "pgc");
  std::vector<Node> nodes;
  std::vector<std::string> t;
  while (nodes.size() < h.b && r.next(t)) {
    if (parse_internal(t, r.line(), nodes)) continue;
    if (t[0] == "v") {
      nodes.emplace_back(VarLeaf{parse_var(t, r.line(), h.a)});
    } else if (t[0] == "k") {
      if (t.size() != 2) throw ParseError("constant line takes one value", r.line());
      nodes.emplace_back(ConstLeaf{parse_real(t[1], r.line())});
    } else {
      throw ParseError("unknown node kind '" + t[0] + "'", r.line());
    }
  }
  if (nodes.size() != h.b) {
    throw ParseError("header declares " + std::to_string(h.b) + " nodes, found " +
                         std::to_string(nodes.size()),
                     r.line());
  }
  expect_end(r);
  try {
    return std::make_shared<const NodeCircuit>(std::move(nodes), h.a);
  } catch (const ContractViolation& e) {
    throw ParseError(e.what(), h.line);
  }
}

void write_pgc(std::ostream& out, const NodeCircuit& c) {
  out << "pgc " << c.num_vars() << ' ' << c.nodes().size() << '\n';
  for (const auto& node : c.nodes()) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, VarLeaf>) {
            out << "v " << n.var + 1 << '\n';
          } else if constexpr (std::is_same_v<T, ConstLeaf>) {
            out << "k " << format_real(n.value) << '\n';
          } else {
            write_internal(out, n);
          }
        },
        node);
  }
}

MassCircuit read_pmc(std::istream& in) {
  LineReader r(in);
  const Header h = read_header(r, "pmc");
  std::vector<MassNode> nodes;
  std::vector<std::string> t;
  while (nodes.size() < h.b && r.next(t)) {
    if (parse_internal(t, r.line(), nodes)) continue;
    if (t[0] == "x") {
      nodes.emplace_back(PosLeaf{parse_var(t, r.line(), h.a)});
    } else if (t[0] == "nx") {
      nodes.emplace_back(NegLeaf{parse_var(t, r.line(), h.a)});
    } else {
      throw ParseError("unknown node kind '" + t[0] + "'", r.line());
    }
  }
  if (nodes.size() != h.b) {
    throw ParseError("header declares " + std::to_string(h.b) + " nodes, found " +
                         std::to_string(nodes.size()),
                     r.line());
  }
  expect_end(r);
  try {
    return MassCircuit(std::move(nodes), h.a);
  } catch (const ContractViolation& e) {
    throw ParseError(e.what(), h.line);
  }
}

void write_pmc(std::ostream& out, const MassCircuit& pc) {
  out << "pmc " << pc.num_vars() << ' ' << pc.nodes().size() << '\n';
  for (const auto& node : pc.nodes()) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, PosLeaf>) {
            out << "x " << n.var + 1 << '\n';
          } else if constexpr (std::is_same_v<T, NegLeaf>) {
            out << "nx " << n.var + 1 << '\n';
          } else {
            write_internal(out, n);
          }
        },
        node);
  }
}

Kernel read_kernel(std::istream& in) {
  LineReader r(in);
  std::vector<std::string> t;
  if (!r.next(t)) throw ParseError("empty input, expected 'kernel' header", r.line());
  if (t.size() != 3 || t[0] != "kernel") {
    throw ParseError("expected 'kernel <kind> <n>' header", r.line());
  }
  Kernel k;
  try {
    k.kind = kernel_kind_from_string(t[1]);
  } catch (const ContractViolation& e) {
    throw ParseError(e.what(), r.line());
  }
  const auto n = static_cast<Eigen::Index>(parse_index(t[2], r.line()));
  k.matrix.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!r.next(t)) throw ParseError("missing kernel row " + std::to_string(i + 1), r.line());
    if (static_cast<Eigen::Index>(t.size()) != n) {
      throw ParseError("kernel row needs " + std::to_string(n) + " entries", r.line());
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      k.matrix(i, j) = parse_real(t[static_cast<std::size_t>(j)], r.line());
    }
  }
  expect_end(r);
  return k;
}

void write_kernel(std::ostream& out, const Kernel& k) {
  out << "kernel " << to_string(k.kind) << ' ' << k.matrix.rows() << '\n';
  for (Eigen::Index i = 0; i < k.matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.matrix.cols(); ++j) {
      out << (j ? " " : "") << format_real(k.matrix(i, j));
    }
    out << '\n';
  }
}

WeightedGraph read_graph(std::istream& in) {
  LineReader r(in);
  const Header h = read_header(r, "graph");
  WeightedGraph g;
  g.num_vertices = h.a;
  std::vector<std::string> t;
  while (g.edges.size() < h.b && r.next(t)) {
    if (t.size() != 3) throw ParseError("edge line is 'u v weight'", r.line());
    const std::size_t u = parse_index(t[0], r.line());
    const std::size_t v = parse_index(t[1], r.line());
    if (u < 1 || u > h.a || v < 1 || v > h.a) {
      throw ParseError("vertex outside 1.." + std::to_string(h.a), r.line());
    }
    g.edges.push_back({u - 1, v - 1, parse_real(t[2], r.line())});
  }
  if (g.edges.size() != h.b) {
    throw ParseError("header declares " + std::to_string(h.b) + " edges, found " +
                         std::to_string(g.edges.size()),
                     r.line());
  }
  expect_end(r);
  return g;
}

void write_graph(std::ostream& out, const WeightedGraph& g) {
  out << "graph " << g.num_vertices << ' ' << g.edges.size() << '\n';
  for (const auto& e : g.edges) {
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << format_real(e.weight) << '\n';
  }
}

std::string peek_format(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  LineReader r(in);
  std::vector<std::string> t;
  if (!r.next(t)) throw ParseError(path.string() + ": empty file", r.line());
  return t[0];
}

std::shared_ptr<const NodeCircuit> load_pgc(const std::filesystem::path& path) {
  return load_with_path(path, [](std::istream& in) { return read_pgc(in); });
}

MassCircuit load_pmc(const std::filesystem::path& path) {
  return load_with_path(path, [](std::istream& in) { return read_pmc(in); });
}

Kernel load_kernel(const std::filesystem::path& path) {
  return load_with_path(path, [](std::istream& in) { return read_kernel(in); });
}

WeightedGraph load_graph(const std::filesystem::path& path) {
  return load_with_path(path, [](std::istream& in) { return read_graph(in); });
}

}  // namespace pgc
