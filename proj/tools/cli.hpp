#ifndef PGC_TOOLS_CLI_HPP
#define PGC_TOOLS_CLI_HPP

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pgc/circuit.hpp"

namespace pgc::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericalFailure = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kReportSchema = "pgc-report/1";

/// Ordered key/value report. The file form is one "key value" pair per
/// line, the first line being "schema pgc-report/1"; values never contain
/// newlines.
class Report {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, std::size_t value);

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }
  void write(std::ostream& out) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Parses a report file back into a map (schema line included).
std::map<std::string, std::string> read_report(std::istream& in);

/// "X1=1,X3=0" with 1-based variable names; empty means no constraints.
/// Throws UsageError on bad syntax, out-of-range variables or conflicts.
MarginalQuery parse_query(const std::string& text, std::size_t num_vars);

/// Entry point shared by the executable and the tests. args[0] is the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace pgc::cli

#endif  // PGC_TOOLS_CLI_HPP
