#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pgc/errors.hpp"
#include "pgc/kernel.hpp"
#include "pgc/learn/checkpoint.hpp"
#include "pgc/learn/train.hpp"
#include "pgc/mass_circuit.hpp"
#include "pgc/text_format.hpp"

namespace pgc::cli {

void Report::set(const std::string& key, const std::string& value) {
  if (key.find_first_of(" \n") != std::string::npos ||
      value.find('\n') != std::string::npos) {
    throw ContractViolation("report: bad key or value for '" + key + "'");
  }
  entries_.emplace_back(key, value);
}

void Report::set(const std::string& key, double value) { set(key, format_real(value)); }

void Report::set(const std::string& key, std::size_t value) {
  set(key, std::to_string(value));
}

void Report::write(std::ostream& out) const {
  out << "schema " << kReportSchema << '\n';
  for (const auto& [k, v] : entries_) out << k << ' ' << v << '\n';
}

std::map<std::string, std::string> read_report(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto space = line.find(' ');
    if (space == std::string::npos) {
      out[line] = "";
    } else {
      out[line.substr(0, space)] = line.substr(space + 1);
    }
  }
  return out;
}

MarginalQuery parse_query(const std::string& text, std::size_t num_vars) {
  MarginalQuery q;
  std::vector<int> seen(num_vars, -1);
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(),
                              [](unsigned char c) { return std::isspace(c); }),
               item.end());
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq < 2 || (item[0] != 'X' && item[0] != 'x')) {
      throw UsageError("query term '" + item + "' must look like X<i>=<0|1>");
    }
    const std::string var = item.substr(1, eq - 1);
    const std::string val = item.substr(eq + 1);
    std::size_t idx = 0;
    try {
      idx = parse_index(var, 0);
    } catch (const ParseError&) {
      throw UsageError("bad variable in query term '" + item + "'");
    }
    if (idx < 1 || idx > num_vars) {
      throw UsageError("unknown variable X" + var + " (circuit has " +
                       std::to_string(num_vars) + " variables)");
    }
    if (val != "0" && val != "1") {
      throw UsageError("query value in '" + item + "' must be 0 or 1");
    }
    const int v = val == "1" ? 1 : 0;
    if (seen[idx - 1] >= 0 && seen[idx - 1] != v) {
      throw UsageError("conflicting values for X" + var);
    }
    if (seen[idx - 1] < 0) (v ? q.ones : q.zeros).push_back(idx - 1);
    seen[idx - 1] = v;
  }
  return q;
}

namespace {

DetBackend parse_backend(const std::string& s) {
  return s == "evalinterp" ? DetBackend::kEvalInterp : DetBackend::kBird;
}

learn::LikelihoodRoute parse_route(const std::string& s) {
  return s == "circuit" ? learn::LikelihoodRoute::kCircuit
                        : learn::LikelihoodRoute::kSupport;
}

CircuitPtr load_circuit(const std::string& path, DetBackend backend) {
  const std::string kind = peek_format(path);
  if (kind == "pgc") return load_pgc(path);
  if (kind == "pmc") return to_pgc(load_pmc(path));
  if (kind == "kernel") {
    const Kernel k = load_kernel(path);
    if (k.kind == KernelKind::kMarginal) return dpp_gp(k, backend);
    if (k.kind == KernelKind::kLEnsemble) {
      const KernelReport rep = validate_kernel(k);
      if (!rep.valid) throw RefusalError(path + ": " + rep.reason);
    }
    return lensemble_gp(k, backend);
  }
  throw UsageError(path + ": unsupported file kind '" + kind +
                   "' (expected pgc, pmc or kernel)");
}

std::string format_prob(double p) {
  std::ostringstream os;
  os << std::setprecision(12) << p;
  return os.str();
}

struct DataSource {
  std::string dir;
  std::string name;
  std::string csv;
  std::string baskets;
  std::size_t items = 0;
  std::uint64_t split_seed = 0;
};

std::string source_label(const DataSource& s) {
  if (!s.dir.empty()) return s.name;
  return std::filesystem::path(s.csv.empty() ? s.baskets : s.csv).stem().string();
}

void check_source(const DataSource& s) {
  const int given = (!s.dir.empty() || !s.name.empty()) + !s.csv.empty() + !s.baskets.empty();
  if (given != 1) {
    throw UsageError("give exactly one of --data-dir/--name, --csv, --baskets");
  }
  if (!s.dir.empty() && s.name.empty()) throw UsageError("--data-dir needs --name");
  if (s.dir.empty() && !s.name.empty()) throw UsageError("--name needs --data-dir");
  if (!s.baskets.empty() && s.items == 0) throw UsageError("--baskets needs --items");
}

BinaryMatrix load_rows(const DataSource& s) {
  return s.csv.empty() ? load_baskets(s.baskets, s.items) : load_binary_csv(s.csv);
}

Dataset load_source(const DataSource& s) {
  check_source(s);
  if (!s.dir.empty()) return load_twenty_datasets(s.dir, s.name);
  return split_dataset(load_rows(s), s.split_seed);
}

bool has_content(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw RefusalError("cannot open " + p.string());
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
  }
  return false;
}

BinaryMatrix load_split(const DataSource& s, const std::string& split) {
  check_source(s);
  if (!s.dir.empty() && split == "all") {
    BinaryMatrix rows;
    for (const char* part : {"train", "valid", "test"}) {
      const BinaryMatrix m = load_split(s, part);
      for (std::size_t r = 0; r < m.rows(); ++r) rows.push_row(m.row(r));
    }
    return rows;
  }
  if (!s.dir.empty()) {
    const auto path = std::filesystem::path(s.dir) / (s.name + "." + split + ".data");
    if (!has_content(path)) throw UsageError("split '" + split + "' is empty");
    return load_binary_csv(path);
  }
  if (!s.csv.empty() && !has_content(s.csv)) throw UsageError("input is empty");
  BinaryMatrix rows = load_rows(s);
  if (split == "all") return rows;
  return split_dataset(rows, s.split_seed).split(split);
}

std::string join_args(const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 1; i < args.size(); ++i) out += (i > 1 ? " " : "") + args[i];
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string partition_string(const GroupPartition& p) {
  std::string out;
  for (std::size_t g = 0; g < p.num_groups(); ++g) {
    if (g) out += '|';
    for (std::size_t k = 0; k < p.groups[g].size(); ++k) {
      out += (k ? "," : "") + std::to_string(p.groups[g][k] + 1);
    }
  }
  return out;
}

void write_report_file(const std::string& path, const Report& r) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw RefusalError("cannot write " + path);
  r.write(f);
}

struct Options {
  std::string backend = "bird";
  std::string report;
  // marginal / oracle-check / convert
  std::string circuit;
  std::string query;
  std::size_t limit = kDefaultEnumerationLimit;
  double tol = kSemanticTolerance;
  std::string output = "-";
  // train / eval
  learn::TrainConfig train;
  std::string route = "support";
  std::string eval_route = "circuit";
  bool grid = false;
  DataSource source;
  std::string checkpoint;
  std::string split = "test";
};

int cmd_marginal(const Options& o, std::ostream& out) {
  const CircuitPtr c = load_circuit(o.circuit, parse_backend(o.backend));
  const MarginalQuery q = parse_query(o.query, c->num_vars());
  const double p = marginal(*c, q);
  out << format_prob(p) << '\n';
  Report r;
  r.set("command", std::string("marginal"));
  r.set("query", o.query.empty() ? std::string("-") : o.query);
  r.set("probability", p);
  write_report_file(o.report, r);
  return kOk;
}

int cmd_convert(const Options& o, std::ostream& out) {
  const auto pgc = to_pgc(load_pmc(o.circuit));
  if (o.output == "-") {
    write_pgc(out, *pgc);
  } else {
    std::ofstream f(o.output);
    if (!f) throw RefusalError("cannot write " + o.output);
    write_pgc(f, *pgc);
  }
  return kOk;
}

int cmd_oracle_check(const Options& o, std::ostream& out) {
  const CircuitPtr c = load_circuit(o.circuit, parse_backend(o.backend));
  const SemanticsReport rep = validate_semantics(*c, o.limit, o.tol);
  out << (rep.ok() ? "PASS" : "FAIL") << " nonnegative=" << rep.nonnegative
      << " normalized=" << rep.normalized << " total=" << format_prob(rep.total)
      << " min_entry=" << format_prob(rep.min_entry)
      << " max_violation=" << format_prob(rep.max_violation) << '\n';
  Report r;
  r.set("command", std::string("oracle-check"));
  r.set("result", std::string(rep.ok() ? "pass" : "fail"));
  r.set("num_vars", c->num_vars());
  r.set("total", rep.total);
  r.set("min_entry", rep.min_entry);
  r.set("max_violation", rep.max_violation);
  write_report_file(o.report, r);
  return rep.ok() ? kOk : kNumericalFailure;
}

int cmd_train(const Options& o, const std::vector<std::string>& args,
              std::ostream& out) {
  learn::TrainConfig cfg = o.train;
  cfg.route = parse_route(o.route);
  const Dataset data = load_source(o.source);
  if (data.test.empty()) throw UsageError("test split is empty");

  const auto start = std::chrono::steady_clock::now();
  learn::TrainResult result;
  Report r;
  r.set("command", join_args(args));
  r.set("dataset", source_label(o.source));
  r.set("num_vars", data.num_vars);
  r.set("rows.train", data.train.rows());
  r.set("rows.valid", data.valid.rows());
  r.set("rows.test", data.test.rows());
  r.set("config.lr", cfg.lr);
  r.set("config.epochs", cfg.epochs);
  r.set("config.batch", cfg.batch);
  r.set("config.weight_decay", cfg.weight_decay);
  r.set("config.seed", static_cast<std::size_t>(cfg.seed));
  r.set("config.threads", cfg.threads);
  r.set("config.route", o.route);
  r.set("config.grid", std::string(o.grid ? "on" : "off"));

  std::size_t sel_k = cfg.K;
  std::size_t sel_c = cfg.C;
  double test_nll = 0.0;
  if (o.grid) {
    r.set("config.K_grid", join_sizes(cfg.K_grid));
    r.set("config.C_grid", join_sizes(cfg.C_grid));
    learn::GridResult g = learn::grid_search(data, cfg);
    r.set("grid.cells", g.cells.size());
    for (const auto& cell : g.cells) {
      const std::string key = "grid.K" + std::to_string(cell.K) + ".C" + std::to_string(cell.C);
      r.set(key, cell.ok ? "ok valid_nll=" + format_real(cell.valid_nll) +
                               " best_epoch=" + std::to_string(cell.best_epoch)
                         : "failed " + cell.error);
    }
    sel_k = g.cells[g.best].K;
    sel_c = g.cells[g.best].C;
    test_nll = g.test_nll;
    result = std::move(g.best_model);
  } else {
    r.set("config.K", cfg.K);
    r.set("config.C", cfg.C);
    result = learn::train(data, cfg);
    test_nll = learn::mean_nll(result.model, data.test, cfg.route, cfg.threads);
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  r.set("selected.K", sel_k);
  r.set("selected.C", sel_c);
  r.set("partition", partition_string(result.model.partition));
  r.set("model.parameters", result.model.num_parameters());
  r.set("best_epoch", result.best_epoch);
  for (const auto& e : result.log) {
    r.set("log." + std::to_string(e.epoch),
          format_real(e.train_nll) + " " + format_real(e.valid_nll));
  }
  r.set("train_nll", result.selected().train_nll);
  r.set("valid_nll", result.selected().valid_nll);
  r.set("test_nll", test_nll);
  r.set("test_ll", -test_nll);

  learn::save_checkpoint(o.checkpoint, result.model);
  write_report_file(o.report, r);

  out << "dataset " << source_label(o.source) << ": n=" << data.num_vars
      << " train/valid/test=" << data.train.rows() << '/' << data.valid.rows() << '/'
      << data.test.rows() << '\n';
  out << "selected K=" << sel_k << " C=" << sel_c << " epoch " << result.best_epoch
      << '\n';
  out << "avg test log-likelihood " << format_prob(-test_nll) << " nats\n";
  out << "parameters " << result.model.num_parameters() << ", train time "
      << std::fixed << std::setprecision(2) << seconds << " s\n";
  out << std::defaultfloat;
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  const learn::SimplePgcModel model = learn::load_checkpoint(o.checkpoint);
  const BinaryMatrix rows = load_split(o.source, o.split);
  if (rows.empty()) throw UsageError("split '" + o.split + "' is empty");
  if (rows.cols() != model.num_vars) {
    throw UsageError("data has " + std::to_string(rows.cols()) +
                     " variables, model has " + std::to_string(model.num_vars));
  }
  const double ll = learn::average_log_likelihood(model, rows, parse_route(o.eval_route),
                                                   o.train.threads, parse_backend(o.backend));
  out << format_prob(ll) << '\n';
  Report r;
  r.set("command", std::string("eval"));
  r.set("split", o.split);
  r.set("rows", rows.rows());
  r.set("route", o.eval_route);
  r.set("avg_ll", ll);
  write_report_file(o.report, r);
  return kOk;
}

void add_source_options(CLI::App* app, DataSource& s) {
  app->add_option("--data-dir", s.dir, "directory with <name>.{train,valid,test}.data");
  app->add_option("--name", s.name, "dataset name inside --data-dir");
  app->add_option("--csv", s.csv, "single comma-separated 0/1 file, split 70/10/20");
  app->add_option("--baskets", s.baskets, "basket file of 1-based item ids, split 70/10/20");
  app->add_option("--items", s.items, "number of items for --baskets");
  app->add_option("--split-seed", s.split_seed, "shuffle seed for --csv/--baskets splits")
      ->envname("PGC_SPLIT_SEED");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Probabilistic generating circuits: queries, conversion, learning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--backend", o.backend, "determinant backend")
      ->check(CLI::IsMember({"bird", "evalinterp"}))
      ->envname("PGC_BACKEND");
  app.add_option("--threads", o.train.threads, "worker threads")
      ->check(CLI::PositiveNumber)
      ->envname("PGC_THREADS");
  app.add_option("--report", o.report, "write a key/value report to this file");

  auto* marginal_cmd = app.add_subcommand("marginal", "marginal probability of a query");
  marginal_cmd->add_option("circuit", o.circuit, "pgc, pmc or kernel file")->required();
  marginal_cmd->add_option("query", o.query, "e.g. X1=1,X3=0; empty for no constraints");

  auto* convert_cmd = app.add_subcommand("convert", "probabilistic mass circuit to PGC");
  convert_cmd->add_option("pc", o.circuit, "pmc file")->required();
  convert_cmd->add_option("-o,--output", o.output, "output file, - for stdout");

  auto* check_cmd = app.add_subcommand("oracle-check", "enumerate and validate a circuit");
  check_cmd->add_option("circuit", o.circuit, "pgc, pmc or kernel file")->required();
  check_cmd->add_option("--limit", o.limit, "largest variable count to enumerate");
  check_cmd->add_option("--tol", o.tol, "tolerance on negativity and normalization");

  auto* train_cmd = app.add_subcommand("train", "fit a SimplePGC");
  auto& t = o.train;
  train_cmd->add_option("--K", t.K, "max group size")->envname("PGC_K");
  train_cmd->add_option("--C", t.C, "mixture components")->envname("PGC_C");
  train_cmd->add_option("--lr", t.lr, "Adam learning rate")->envname("PGC_LR");
  train_cmd->add_option("--epochs", t.epochs)->envname("PGC_EPOCHS");
  train_cmd->add_option("--batch", t.batch)->envname("PGC_BATCH");
  train_cmd->add_option("--weight-decay", t.weight_decay)->envname("PGC_WEIGHT_DECAY");
  train_cmd->add_option("--seed", t.seed)->envname("PGC_SEED");
  train_cmd->add_flag("--grid", o.grid, "search K_grid x C_grid")->envname("PGC_GRID");
  train_cmd->add_option("--K-grid", t.K_grid)->delimiter(',')->envname("PGC_K_GRID");
  train_cmd->add_option("--C-grid", t.C_grid)->delimiter(',')->envname("PGC_C_GRID");
  train_cmd->add_option("--route", o.route, "likelihood route used for training")
      ->check(CLI::IsMember({"support", "circuit"}))
      ->envname("PGC_ROUTE");
  train_cmd->add_option("--out", o.checkpoint, "checkpoint file")->required();
  add_source_options(train_cmd, o.source);

  auto* eval_cmd = app.add_subcommand("eval", "average log-likelihood of a split");
  eval_cmd->add_option("checkpoint", o.checkpoint)->required();
  eval_cmd->add_option("--split", o.split)
      ->check(CLI::IsMember({"train", "valid", "test", "all"}));
  eval_cmd->add_option("--route", o.eval_route)
      ->check(CLI::IsMember({"support", "circuit"}));
  add_source_options(eval_cmd, o.source);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  const std::string context =
      train_cmd->parsed() ? "dataset " + source_label(o.source) + ": " : std::string();
  try {
    if (marginal_cmd->parsed()) return cmd_marginal(o, out);
    if (convert_cmd->parsed()) return cmd_convert(o, out);
    if (check_cmd->parsed()) return cmd_oracle_check(o, out);
    if (train_cmd->parsed()) return cmd_train(o, args, out);
    if (eval_cmd->parsed()) return cmd_eval(o, out);
  } catch (const UsageError& e) {
    err << "usage error: " << context << e.what() << '\n';
    return kUsage;
  } catch (const ContractViolation& e) {
    err << "usage error: " << context << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "data error: " << context << e.what() << '\n';
    return kDataError;
  } catch (const RefusalError& e) {
    err << "refused: " << context << e.what() << '\n';
    return kDataError;
  } catch (const learn::DivergenceError& e) {
    err << "numerical failure: " << context << e.what() << '\n';
    for (const auto& l : e.log()) {
      err << "  epoch " << l.epoch << " train_nll " << l.train_nll << " valid_nll "
          << l.valid_nll << '\n';
    }
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "numerical failure: " << context << e.what() << '\n';
    return kNumericalFailure;
  }
  return kUsage;
}

}  // namespace pgc::cli
