#include "pgc/learn/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pgc/errors.hpp"
#include "pgc/text_format.hpp"

namespace pgc::learn {

namespace {

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  // Next non-empty line; the first token must equal `key`.
  std::vector<std::string> expect(const std::string& key) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      std::istringstream ss(line);
      std::vector<std::string> t;
      for (std::string s; ss >> s;) t.push_back(s);
      if (t.empty()) continue;
      if (t[0] != key) throw ParseError("expected '" + key + "', found '" + t[0] + "'", line_);
      return t;
    }
    throw ParseError("unexpected end of checkpoint, expected '" + key + "'", line_);
  }

  std::size_t line() const { return line_; }

  std::size_t one_index(const std::string& key) {
    const auto t = expect(key);
    if (t.size() != 2) throw ParseError("'" + key + "' takes one value", line_);
    return parse_index(t[1], line_);
  }

  Eigen::VectorXd reals(const std::string& key, std::size_t count) {
    const auto t = expect(key);
    if (t.size() != count + 1) {
      throw ParseError("'" + key + "' needs " + std::to_string(count) + " values", line_);
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(count));
    for (std::size_t i = 0; i < count; ++i) {
      v(static_cast<Eigen::Index>(i)) = parse_real(t[i + 1], line_);
    }
    return v;
  }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

void write_reals(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_real(v(i));
  out << '\n';
}

}  // namespace

void write_checkpoint(std::ostream& out, const SimplePgcModel& model) {
  model.validate();
  out << "pgc-model " << kCheckpointVersion << '\n';
  out << "vars " << model.num_vars << '\n';
  out << "groups " << model.partition.num_groups() << '\n';
  for (const auto& g : model.partition.groups) {
    out << "group";
    for (auto v : g) out << ' ' << v + 1;
    out << '\n';
  }
  out << "components " << model.components.size() << '\n';
  write_reals(out, "logits", model.logits);
  for (const auto& c : model.components) {
    for (Eigen::Index i = 0; i < c.factor.rows(); ++i) {
      write_reals(out, "factor", c.factor.row(i).transpose());
    }
    for (const auto& t : c.theta) write_reals(out, "theta", t);
  }
  out << "end\n";
}

SimplePgcModel read_checkpoint(std::istream& in) {
  Reader r(in);
  const auto head = r.expect("pgc-model");
  if (head.size() != 2 || head[1] != std::to_string(kCheckpointVersion)) {
    throw ParseError("unsupported checkpoint version", r.line());
  }
  SimplePgcModel m;
  m.num_vars = r.one_index("vars");
  const std::size_t groups = r.one_index("groups");
  for (std::size_t g = 0; g < groups; ++g) {
    const auto t = r.expect("group");
    std::vector<std::size_t> members;
    for (std::size_t i = 1; i < t.size(); ++i) {
      const std::size_t v = parse_index(t[i], r.line());
      if (v < 1 || v > m.num_vars) throw ParseError("variable out of range", r.line());
      members.push_back(v - 1);
    }
    if (members.empty() || members.size() > kMaxLeafGroup) {
      throw ParseError("group size must be in 1.." + std::to_string(kMaxLeafGroup), r.line());
    }
    m.partition.groups.push_back(std::move(members));
  }
  const std::size_t nc = r.one_index("components");
  m.logits = r.reals("logits", nc);
  for (std::size_t c = 0; c < nc; ++c) {
    Component comp;
    const auto mg = static_cast<Eigen::Index>(groups);
    comp.factor.resize(mg, mg);
    for (Eigen::Index i = 0; i < mg; ++i) comp.factor.row(i) = r.reals("factor", groups).transpose();
    for (const auto& g : m.partition.groups) {
      comp.theta.push_back(r.reals("theta", (std::size_t{1} << g.size()) - 1));
    }
    m.components.push_back(std::move(comp));
  }
  r.expect("end");
  try {
    m.validate();
  } catch (const ContractViolation& e) {
    throw ParseError(e.what(), r.line());
  }
  return m;
}

void save_checkpoint(const std::filesystem::path& path, const SimplePgcModel& model) {
  std::ofstream out(path);
  if (!out) throw RefusalError("cannot write " + path.string());
  write_checkpoint(out, model);
  if (!out) throw RefusalError("write failed: " + path.string());
}

SimplePgcModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RefusalError("cannot open " + path.string());
  try {
    return read_checkpoint(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line());
  }
}

}  // namespace pgc::learn
